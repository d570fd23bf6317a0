#include "plates/eigensolve.hpp"

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace plates {

namespace {

class Ldlt : public Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> {
public:
    double predicted_fill() const { return m_nonZerosPerCol.cast<double>().sum(); }
};

double inf_norm(const SparseMatrix& a)
{
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            rows[it.row()] += std::abs(it.value());
    return a.rows() ? rows.maxCoeff() : 0.0;
}

// symmetric scaling d_i = 1 / sqrt(max_j |a_ij|)
Eigen::VectorXd equilibration(const SparseMatrix& a)
{
    Eigen::VectorXd m = Eigen::VectorXd::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            m[it.row()] = std::max(m[it.row()], std::abs(it.value()));
    for (Eigen::Index r = 0; r < m.size(); ++r)
        m[r] = m[r] > 0 ? 1.0 / std::sqrt(m[r]) : 1.0;
    return m;
}

}  // namespace

struct ShiftedFactorization::Impl {
    Ldlt ldlt;
    std::unique_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu;
    bool use_lu = false;
    Eigen::VectorXd d;
    SparseMatrix scaled;

    Eigen::VectorXd apply(const Eigen::VectorXd& b) const
    {
        Eigen::VectorXd db = d.cwiseProduct(b);
        Eigen::VectorXd y = use_lu ? Eigen::VectorXd(lu->solve(db)) : Eigen::VectorXd(ldlt.solve(db));
        return d.cwiseProduct(y);
    }
};

ShiftedFactorization::ShiftedFactorization(const SparseMatrix& k, const SparseMatrix& m, double sigma,
                                           const FactorizeOptions& opt)
    : impl_(std::make_unique<Impl>()), sigma_(sigma), opt_(opt)
{
    if (k.rows() != k.cols() || m.rows() != k.rows() || m.cols() != k.cols())
        throw FactorizationError("K and M must be square and of equal size");
    a_ = k - sigma * m;
    a_.makeCompressed();
    norm_a_ = inf_norm(a_);

    impl_->d = equilibration(a_);
    impl_->scaled = impl_->d.asDiagonal() * a_ * impl_->d.asDiagonal();
    impl_->ldlt.analyzePattern(impl_->scaled);
    fill_ = impl_->ldlt.predicted_fill() + a_.rows();
    if (fill_ > opt.fill_budget) {
        std::ostringstream msg;
        msg << "factor would hold about " << fill_ << " nonzeros, over the budget of " << opt.fill_budget
            << "; raise the budget or export the matrices and use an external solver";
        throw MemoryBudgetError(msg.str());
    }
    impl_->ldlt.factorize(impl_->scaled);
    bool ok = impl_->ldlt.info() == Eigen::Success && impl_->ldlt.vectorD().allFinite() &&
              (impl_->ldlt.vectorD().array() != 0.0).all();
    if (ok) {
        method_ = "ldlt-amd";
        negative_pivots_ = static_cast<int>((impl_->ldlt.vectorD().array() < 0).count());
        try {
            solve(Eigen::VectorXd::Ones(a_.rows()));
        } catch (const FactorizationError&) {
            ok = false;
        }
    }
    if (!ok) {
        impl_->use_lu = true;
        impl_->lu = std::make_unique<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
        impl_->lu->analyzePattern(impl_->scaled);
        impl_->lu->factorize(impl_->scaled);
        if (impl_->lu->info() != Eigen::Success)
            throw FactorizationError("factorization of K - sigma M broke down at sigma = " + std::to_string(sigma));
        method_ = "sparse-lu";
        negative_pivots_ = -1;
        solve(Eigen::VectorXd::Ones(a_.rows()));
    }
}

ShiftedFactorization::~ShiftedFactorization() = default;

Eigen::VectorXd ShiftedFactorization::solve(const Eigen::VectorXd& rhs) const
{
    if (rhs.size() != a_.rows())
        throw FactorizationError("right-hand side has the wrong size");
    const double nb = rhs.lpNorm<Eigen::Infinity>();
    if (nb == 0.0) {
        last_eta_ = 0;
        return Eigen::VectorXd::Zero(rhs.size());
    }
    Eigen::VectorXd x = impl_->apply(rhs);
    double eta = 0;
    for (int step = 0;; ++step) {
        Eigen::VectorXd r = rhs - a_ * x;
        eta = r.lpNorm<Eigen::Infinity>() / (norm_a_ * x.lpNorm<Eigen::Infinity>() + nb);
        if (!std::isfinite(eta))
            throw FactorizationError("non-finite solution");
        if (eta <= 0.01 * opt_.backward_tol || step == opt_.refinement_steps)
            break;
        x += impl_->apply(r);
    }
    last_eta_ = eta;
    if (eta > opt_.backward_tol) {
        std::ostringstream msg;
        msg << "solve residual check failed: backward error " << eta;
        throw FactorizationError(msg.str());
    }
    return x;
}

std::unique_ptr<ShiftedFactorization> factorize_shifted(const SparseMatrix& k, const SparseMatrix& m, double sigma,
                                                        const FactorizeOptions& opt, bool* perturbed)
{
    if (perturbed)
        *perturbed = false;
    try {
        return std::make_unique<ShiftedFactorization>(k, m, sigma, opt);
    } catch (const FactorizationError&) {
        if (perturbed)
            *perturbed = true;
        return std::make_unique<ShiftedFactorization>(k, m, sigma * (1 + 1e-8), opt);
    }
}

ModeSearch modes_near(const SparseMatrix& k, const SparseMatrix& i, double rho, double f_target, int count,
                      const EigenOptions& opt)
{
    const int n = static_cast<int>(k.rows());
    if (!(f_target > 0))
        throw std::invalid_argument("target frequency must be positive");
    if (!(rho > 0))
        throw std::invalid_argument("density must be positive");
    if (count < 1 || count > n)
        throw std::invalid_argument("mode count must be between 1 and the system size");

    ModeSearch out;
    const double omega = 2 * M_PI * f_target;
    // work with unit-diagonal Gram matrix: c = D y, D = diag(I)^(-1/2)
    Eigen::VectorXd dg = i.diagonal();
    if (!(dg.minCoeff() > 0))
        throw FactorizationError("Gram matrix has a non-positive diagonal entry");
    dg = dg.cwiseSqrt().cwiseInverse();
    SparseMatrix ks = dg.asDiagonal() * k * dg.asDiagonal();
    SparseMatrix m = dg.asDiagonal() * i * dg.asDiagonal();
    m *= rho;
    SparseMatrix m_orig = rho * i;
    auto fac = factorize_shifted(ks, m, -omega * omega, opt.factor, &out.shift_perturbed);
    const double sigma = fac->sigma();
    out.sigma = sigma;
    out.factorization = fac->method();

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto m_norm = [&](const Eigen::VectorXd& x) { return std::sqrt(std::max(0.0, x.dot(m * x))); };

    struct Ritz {
        Eigen::VectorXd theta;  // nearest first
        Eigen::MatrixXd y;      // m-orthonormal columns
    };

    // thick-restart Lanczos for the `want` Ritz pairs of largest |theta| of
    // (K - sigma M)^-1 M restricted to the m-complement of `locked`
    auto lanczos = [&](const Eigen::MatrixXd& locked, int want, const Eigen::VectorXd& v0) {
        const int free_dim = n - static_cast<int>(locked.cols());
        int dim = opt.krylov_dim > 0 ? opt.krylov_dim : std::max(2 * want + 20, 30);
        dim = std::min(dim, free_dim);
        want = std::min(want, dim);
        const int keep = std::min(dim - 1, std::max(want, want + (dim - want) / 2));

        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, dim + 1);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim + 1, dim);
        auto deflate = [&](Eigen::VectorXd& w) {
            if (locked.cols() > 0)
                w -= locked * (locked.transpose() * (m * w));
        };
        // orthogonalize against columns [0, j) twice; returns the coefficients
        auto orthogonalize = [&](Eigen::VectorXd& w, int j) {
            Eigen::VectorXd coef = Eigen::VectorXd::Zero(j);
            for (int pass = 0; pass < 2; ++pass) {
                deflate(w);
                if (j == 0)
                    continue;
                Eigen::VectorXd c = v.leftCols(j).transpose() * (m * w);
                w -= v.leftCols(j) * c;
                coef += c;
            }
            return coef;
        };
        // a fresh direction when the Krylov space becomes invariant
        auto restart_vector = [&](int j) {
            for (int attempt = 0; attempt < 10; ++attempt) {
                Eigen::VectorXd w(n);
                for (int r = 0; r < n; ++r)
                    w[r] = unif(rng);
                orthogonalize(w, j);
                double b = m_norm(w);
                if (b > 1e-8)
                    return Eigen::VectorXd(w / b);
            }
            throw ConvergenceError("could not extend the Krylov basis", {});
        };

        Eigen::VectorXd w0 = v0;
        orthogonalize(w0, 0);
        const double b0 = m_norm(w0);
        v.col(0) = b0 > 1e-8 * m_norm(v0) ? Eigen::VectorXd(w0 / b0) : restart_vector(0);
        int start = 0;
        const int max_restarts = 10 * want;
        std::vector<double> best(want, INFINITY);
        Eigen::VectorXd theta;
        Eigen::MatrixXd s;
        std::vector<int> order;

        for (int restart = 0;; ++restart) {
            for (int j = start; j < dim; ++j) {
                Eigen::VectorXd w = fac->solve(m * v.col(j));
                ++out.operator_applications;
                Eigen::VectorXd coef = orthogonalize(w, j + 1);
                h.block(0, j, j + 1, 1) = coef;
                double beta = m_norm(w);
                double scale = coef.cwiseAbs().maxCoeff();
                if (j + 1 == free_dim || beta <= 1e-12 * scale || beta == 0.0) {
                    h(j + 1, j) = 0.0;
                    if (j + 1 < free_dim)
                        v.col(j + 1) = restart_vector(j + 1);
                } else {
                    h(j + 1, j) = beta;
                    v.col(j + 1) = w / beta;
                }
            }
            Eigen::MatrixXd t = h.topRows(dim);
            t = 0.5 * (t + t.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            theta = es.eigenvalues();
            s = es.eigenvectors();
            order.resize(dim);
            std::iota(order.begin(), order.end(), 0);
            // largest |theta| is closest to the shift
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]); });

            Eigen::RowVectorXd brow = h.row(dim);
            bool converged = true;
            for (int q = 0; q < want; ++q) {
                int idx = order[q];
                double res = std::abs(brow.dot(s.col(idx))) / std::abs(theta[idx]);
                best[q] = std::min(best[q], res);
                if (!(res <= opt.tol))
                    converged = false;
            }
            if (converged)
                break;
            if (restart >= max_restarts) {
                std::ostringstream msg;
                msg << "Lanczos did not converge after " << restart << " restarts";
                throw ConvergenceError(msg.str(), best);
            }
            ++out.restarts;

            // thick restart on the `keep` Ritz vectors nearest the shift
            Eigen::MatrixXd sk(dim, keep);
            for (int q = 0; q < keep; ++q)
                sk.col(q) = s.col(order[q]);
            Eigen::MatrixXd vk = v.leftCols(dim) * sk;
            Eigen::VectorXd vlast = v.col(dim);
            Eigen::RowVectorXd bk = brow * sk;
            v.setZero();
            h.setZero();
            v.leftCols(keep) = vk;
            v.col(keep) = vlast;
            for (int q = 0; q < keep; ++q)
                h(q, q) = theta[order[q]];
            h.block(keep, 0, 1, keep) = bk;
            // the column for v_keep is rebuilt by the next sweep; its coupling to
            // the kept vectors equals bk
            start = keep;
        }

        Ritz r;
        r.theta.resize(want);
        r.y.resize(n, want);
        for (int q = 0; q < want; ++q) {
            r.theta[q] = theta[order[q]];
            Eigen::VectorXd y = v.leftCols(dim) * s.col(order[q]);
            r.y.col(q) = y / m_norm(y);
        }
        return r;
    };

    // A single Krylov sequence sees one vector of each multiple eigenvalue.
    // Further runs deflated against the pairs found so far pick up any
    // nearer eigenvalue it missed; the search stops when a run finds none.
    Ritz pool = lanczos(Eigen::MatrixXd(n, 0), count, Eigen::VectorXd::Ones(n));
    for (int pass = 0; pass < count + 1 && pool.y.cols() < n; ++pass) {
        Eigen::VectorXd start(n);
        for (int r = 0; r < n; ++r)
            start[r] = unif(rng);
        Ritz extra = lanczos(pool.y, count, start);
        ++out.deflation_passes;
        const double farthest = pool.theta.cwiseAbs().minCoeff();
        if (!(extra.theta.size() > 0 && std::abs(extra.theta[0]) > farthest * (1 + opt.tol)))
            break;
        const int total = static_cast<int>(pool.theta.size() + extra.theta.size());
        Eigen::VectorXd th(total);
        Eigen::MatrixXd y(n, total);
        th << pool.theta, extra.theta;
        y << pool.y, extra.y;
        std::vector<int> idx(total);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(th[a]) > std::abs(th[b]); });
        pool.theta.resize(count);
        pool.y.resize(n, count);
        for (int q = 0; q < count; ++q) {
            pool.theta[q] = th[idx[q]];
            pool.y.col(q) = y.col(idx[q]);
        }
    }

    const double norm_k = inf_norm(k), norm_m = inf_norm(m_orig);
    for (int q = 0; q < count; ++q) {
        Eigen::VectorXd c = dg.cwiseProduct(pool.y.col(q));
        int big = 0;
        c.cwiseAbs().maxCoeff(&big);
        if (c[big] < 0)
            c = -c;
        ModeResult r;
        r.mu = sigma + 1.0 / pool.theta[q];
        r.oscillatory = r.mu < 0;
        r.f_r = std::sqrt(std::abs(r.mu)) / (2 * M_PI);
        Eigen::VectorXd mc = m_orig * c;
        Eigen::VectorXd kc = k * c;
        Eigen::VectorXd res = kc - r.mu * mc;
        r.residual = res.norm() / mc.norm();
        r.backward_error = res.norm() / ((norm_k + std::abs(r.mu) * norm_m) * c.norm());
        r.coeffs = std::move(c);
        out.modes.push_back(std::move(r));
    }
    return out;
}

}  // namespace plates
