#include "plates/iterate.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace plates {

namespace {

using Triplet = Eigen::Triplet<double>;

enum Cls { EdgeIn, EdgeBd, FaceIn, FaceBd };

double boundary_entry(Cls ca, Cls cc, double q_ac, double q_ca, double d_ac, double d_ca, double s_ac, double s_ca)
{
    const bool ea = ca == EdgeIn || ca == EdgeBd, ec = cc == EdgeIn || cc == EdgeBd;
    const double qs = q_ac + q_ca;
    if (ea && ec)
        return ca == EdgeBd && cc == EdgeBd ? -0.5 * qs : 0.0;
    if (!ea && !ec)
        return ca == FaceBd && cc == FaceBd ? 0.5 * (s_ac + s_ca) + 0.5 * (d_ac + d_ca) - 0.5 * qs : 0.0;
    // edge row, face column
    if (!ea)
        return boundary_entry(cc, ca, q_ca, q_ac, d_ca, d_ac, s_ca, s_ac);
    if (ca == EdgeIn)
        return cc == FaceBd ? 0.5 * (d_ac - qs) : 0.0;
    return 0.5 * s_ac + 0.5 * d_ac - 0.5 * qs;
}

Cls classify(const SimplicialComplex3& kp, const BasisIndex& b, int id)
{
    const int s = b.simplex(id);
    if (b.is_edge(id))
        return kp.edge_on_boundary(s) ? EdgeBd : EdgeIn;
    return kp.face_on_boundary(s) ? FaceBd : FaceIn;
}

Eigen::Matrix3d field_jacobian(const SimplicialComplex3& kp, const BasisIndex& b, const Eigen::VectorXd& u, int t,
                               const TetGeometry& g)
{
    auto fields = local_fields(g);
    auto ids = local_basis_ids(kp, b, t);
    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
    for (int a = 0; a < kLocalFields; ++a)
        if (u[ids[a]] != 0.0)
            j += u[ids[a]] * fields[a].jacobian(g);
    return j;
}

}  // namespace

SparseMatrix assemble_iterate_operator(const SimplicialComplex3& kp, const BasisIndex& b, const ElasticTensor& w,
                                       Execution ex)
{
    SparseMatrix a = assemble_volume_stiffness(kp, b, w, 1.0, ex);
    std::vector<Triplet> trip;
    trip.reserve(100 * static_cast<std::size_t>(kp.num_boundary_faces()));
    for (int f : kp.boundary_faces()) {
        BoundaryFace bf = boundary_face(kp, f);
        TetGeometry g = tet_geometry(kp, bf.tet);
        auto fields = local_fields(g);
        auto ids = local_basis_ids(kp, b, bf.tet);
        Eigen::Matrix<double, kLocalFields, kLocalFields> q, d, s;
        for (int x = 0; x < kLocalFields; ++x)
            for (int y = 0; y < kLocalFields; ++y) {
                q(x, y) = face_pairing(fields[x], fields[y], g, bf, BoundaryPairing::BoundaryStress, &w);
                d(x, y) = face_pairing(fields[x], fields[y], g, bf, BoundaryPairing::DivNormal, &w);
                s(x, y) = face_pairing(fields[x], fields[y], g, bf, BoundaryPairing::TractionDot, &w);
            }
        std::array<Cls, kLocalFields> cls;
        for (int x = 0; x < kLocalFields; ++x)
            cls[x] = classify(kp, b, ids[x]);
        for (int x = 0; x < kLocalFields; ++x)
            for (int y = 0; y < kLocalFields; ++y) {
                double v = boundary_entry(cls[x], cls[y], q(x, y), q(y, x), d(x, y), d(y, x), s(x, y), s(y, x));
                if (v != 0.0)
                    trip.emplace_back(ids[x], ids[y], v);
            }
    }
    SparseMatrix bd(b.size(), b.size());
    bd.setFromTriplets(trip.begin(), trip.end());
    SparseMatrix out = a + bd;
    SparseMatrix sym = 0.5 * (SparseMatrix(out.transpose()) + out);
    return sym;
}

Eigen::VectorXd pressure_potential(const SimplicialComplex3& kp, const BasisIndex& b, double rho,
                                   const Eigen::VectorXd& u)
{
    const int nv = kp.num_vertices();
    std::vector<int> free(nv, -1);
    int nf = 0;
    for (int p = 0; p < nv; ++p)
        if (!kp.vertex_on_boundary(p))
            free[p] = nf++;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(nv);
    if (nf == 0)
        return q;
    std::vector<Triplet> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (int t = 0; t < kp.num_tets(); ++t) {
        TetGeometry g = tet_geometry(kp, t);
        Eigen::Matrix3d j = field_jacobian(kp, b, u, t, g);
        const double src = rho * (j * j).trace();
        const auto& tv = kp.tet(t);
        for (int x = 0; x < 4; ++x) {
            const int r = free[tv[x]];
            if (r < 0)
                continue;
            rhs[r] -= src * g.volume / 4.0;
            for (int y = 0; y < 4; ++y) {
                const int c = free[tv[y]];
                if (c >= 0)
                    trip.emplace_back(r, c, g.volume * g.grad[x].dot(g.grad[y]));
            }
        }
    }
    SparseMatrix lap(nf, nf);
    lap.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(lap);
    if (ldlt.info() != Eigen::Success)
        throw FactorizationError("pressure Laplacian factorization failed");
    Eigen::VectorXd sol = ldlt.solve(rhs);
    for (int p = 0; p < nv; ++p)
        if (free[p] >= 0)
            q[p] = sol[free[p]];
    return q;
}

Eigen::VectorXd pressure_load(const SimplicialComplex3& kp, const BasisIndex& b, const Eigen::VectorXd& q)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(b.size());
    for (int t = 0; t < kp.num_tets(); ++t) {
        TetGeometry g = tet_geometry(kp, t);
        const auto& tv = kp.tet(t);
        Vec3 grad = Vec3::Zero();
        for (int x = 0; x < 4; ++x)
            grad += q[tv[x]] * g.grad[x];
        if (grad.isZero(0.0))
            continue;
        auto fields = local_fields(g);
        auto ids = local_basis_ids(kp, b, t);
        // int lambda_k = V / 4
        for (int a = 0; a < kLocalFields; ++a)
            out[ids[a]] += grad.dot(fields[a].v.rowwise().sum()) * g.volume / 4.0;
    }
    return out;
}

double estimate_max_eigenvalue(const SparseMatrix& a, const SparseMatrix& m, const std::vector<int>& pins, int steps)
{
    const int n = static_cast<int>(a.rows());
    SparseMatrix mr = m;
    double scale = 0;
    for (int p : pins)
        scale = std::max(scale, m.coeff(p, p));
    if (scale == 0)
        scale = 1;
    for (int p : pins)
        mr.coeffRef(p, p) += scale;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(mr);
    if (ldlt.info() != Eigen::Success)
        throw FactorizationError("regularised Gram factorization failed");

    steps = std::max(1, std::min(steps, n));
    Eigen::MatrixXd v(n, steps + 1);
    Eigen::MatrixXd mv(n, steps + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(steps + 1, steps);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    Eigen::VectorXd x(n);
    for (int r = 0; r < n; ++r)
        x[r] = nd(rng);
    x /= std::sqrt(x.dot(mr * x));
    v.col(0) = x;
    mv.col(0) = mr * x;
    int built = steps;
    for (int k = 0; k < steps; ++k) {
        Eigen::VectorXd wv = ldlt.solve(a * v.col(k));
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= k; ++i) {
                double c = mv.col(i).dot(wv);
                h(i, k) += c;
                wv -= c * v.col(i);
            }
        Eigen::VectorXd mw = mr * wv;
        double beta = std::sqrt(std::max(0.0, wv.dot(mw)));
        h(k + 1, k) = beta;
        if (beta <= 1e-14 * std::max(1.0, h.col(k).head(k + 1).norm())) {
            built = k + 1;
            break;
        }
        v.col(k + 1) = wv / beta;
        mv.col(k + 1) = mw / beta;
    }
    Eigen::MatrixXd t = h.topLeftCorner(built, built);
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

Eigen::VectorXd iterate_rhs(const SimplicialComplex3& kp, const BasisIndex& b, const SparseMatrix& gram, double rho,
                            double g, const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& int_u,
                            const Eigen::VectorXd& int_f, const Eigen::VectorXd& position)
{
    Eigen::VectorXd q = pressure_potential(kp, b, rho, u);
    return -pressure_load(kp, b, q) - rho * (gram * v) + int_f + g * (gram * (position + int_u));
}

std::vector<double> iterate_times(double omega, int n)
{
    if (n < 1)
        throw std::invalid_argument("need at least one time step");
    std::vector<double> t(n + 1);
    for (int i = 0; i <= n; ++i)
        t[i] = i * 2 * M_PI / (n * omega);
    return t;
}

IterateSolution first_iterate(const SimplicialComplex3& kp, const ElasticTensor& w, double rho,
                              const ResonanceWave& wave, const ForcingVectors& forcing,
                              const std::vector<double>& times, const IterateOptions& opt, Execution ex)
{
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("iterate times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("iterate times must increase");
    if (!(rho > 0))
        throw std::invalid_argument("density must be positive");

    BasisIndex b = coarse_basis(kp);
    const int n = b.size();
    if (wave.c1.size() != n || forcing.c1.size() != n)
        throw std::invalid_argument("wave and forcing must be on the coarse basis of the mesh");

    IterateSolution out;
    out.times = times;
    out.position = position_coefficients(kp, b);

    SparseMatrix a = assemble_iterate_operator(kp, b, w, ex);
    SparseMatrix gram = assemble_gram(kp, b, ex);
    ConstraintReduction red = boundary_condition_system(kp, w, ConstraintKind::StressOnly, ex);
    FineEmbedding emb = fine_embedding(b, red);
    SparseMatrix pt = emb.P.transpose();
    SparseMatrix af = pt * a * emb.P;
    af = 0.5 * (SparseMatrix(af.transpose()) + af);
    SparseMatrix mf = pt * gram * emb.P;
    mf = 0.5 * (SparseMatrix(mf.transpose()) + mf);
    out.fine_size = static_cast<int>(af.rows());

    // pin the three edges of tet 0 at its first vertex: their circulations
    // determine a constant field
    std::vector<int> pins;
    for (int l = 0; l < 3; ++l) {
        int coarse = b.edge_id(kp.tet_edges(0)[l]);
        auto it = std::find(emb.fine_to_coarse.begin(), emb.fine_to_coarse.end(), coarse);
        if (it != emb.fine_to_coarse.end())
            pins.push_back(static_cast<int>(it - emb.fine_to_coarse.begin()));
    }
    out.lambda_max = estimate_max_eigenvalue(af, mf, pins, opt.lanczos_steps);
    if (opt.g > 0) {
        if (opt.g <= out.lambda_max) {
            std::ostringstream msg;
            msg << "gamma^2 rho = " << opt.g << " does not exceed the spectral bound " << out.lambda_max;
            throw SpectralBoundError(msg.str());
        }
        out.g = opt.g;
    } else {
        out.g = opt.safety * std::abs(out.lambda_max);
        if (out.g == 0)
            out.g = 1;
    }

    SparseMatrix neg_a = -af;
    ShiftedFactorization fac(neg_a, mf, -out.g, opt.factor);
    out.negative_pivots = fac.negative_pivots();
    out.factorization = fac.method();
    if (out.negative_pivots > 0) {
        std::ostringstream msg;
        msg << "g I - A has " << out.negative_pivots << " negative pivots";
        out.warnings.push_back(msg.str());
    }

    const Eigen::VectorXd gx = out.g * (gram * out.position);
    const double sgn = wave.sign == WaveSign::Minus ? -1.0 : 1.0;
    auto load = [&](double t) -> Eigen::VectorXd {
        return forcing.c1 * std::cos(wave.omega * t) + sgn * std::sin(wave.omega * t) * forcing.c2;
    };
    Eigen::VectorXd int_u = Eigen::VectorXd::Zero(n), int_f = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd u_prev = wave.coefficients(times[0]), f_prev = load(times[0]);
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        Eigen::VectorXd u = wave.coefficients(t);
        Eigen::VectorXd f = load(t);
        if (j > 0) {
            const double dt = t - times[j - 1];
            int_u += 0.5 * dt * (u_prev + u);
            int_f += 0.5 * dt * (f_prev + f);
        }
        u_prev = u;
        f_prev = f;
        Eigen::VectorXd rhs =
            iterate_rhs(kp, b, gram, rho, out.g, u, wave.velocity(t), int_u, int_f, out.position) - gx;
        Eigen::VectorXd y = fac.solve(pt * rhs);
        out.xi.push_back(emb.P * y);
    }
    return out;
}

}  // namespace plates
