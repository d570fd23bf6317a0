#include <doctest.h>

#include "oracles/dense_pencil.hpp"
#include "plates/assembly.hpp"
#include "plates/eigensolve.hpp"

#include <Eigen/Dense>

#include <cstring>
#include <random>

using namespace plates;

namespace {

// random sparse SPD matrix: banded with a dominant diagonal
SparseMatrix random_spd(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 6.0 + u(rng));
        for (int d = 1; d <= 3 && i + d < n; ++d) {
            const double v = u(rng);
            t.emplace_back(i, i + d, v);
            t.emplace_back(i + d, i, v);
        }
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix random_sym(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i)
        for (int d = 0; d <= 5 && i + d < n; ++d) {
            const double v = u(rng);
            t.emplace_back(i, i + d, v);
            if (d > 0)
                t.emplace_back(i + d, i, v);
        }
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

}  // namespace

TEST_CASE("scaled Gram pencil has a single 1 Hz eigenvalue")
{
    const double rho = 360;
    SparseMatrix i = random_spd(60, 1);
    SparseMatrix k = -(2 * M_PI) * (2 * M_PI) * rho * i;
    auto search = modes_near(k, i, rho, 3.0, 3);
    REQUIRE(search.modes.size() == 3);
    for (const auto& m : search.modes) {
        CHECK(m.f_r == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(m.oscillatory);
        CHECK(m.residual <= 1e-10);
        CHECK(m.coeffs.dot(rho * (i * m.coeffs)) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("diagonal pencil returns the nearest eigenvalues")
{
    const int n = 120;
    const double rho = 2;
    std::vector<Eigen::Triplet<double>> tk, ti;
    for (int j = 0; j < n; ++j) {
        const double f = 10.0 + 3.0 * j;
        ti.emplace_back(j, j, 1.0 + 0.01 * j);
        tk.emplace_back(j, j, -std::pow(2 * M_PI * f, 2) * rho * (1.0 + 0.01 * j));
    }
    SparseMatrix k(n, n), i(n, n);
    k.setFromTriplets(tk.begin(), tk.end());
    i.setFromTriplets(ti.begin(), ti.end());
    auto search = modes_near(k, i, rho, 101.0, 4);
    std::vector<double> fs;
    for (const auto& m : search.modes)
        fs.push_back(m.f_r);
    std::sort(fs.begin(), fs.end());
    REQUIRE(fs.size() == 4);
    CHECK(fs[0] == doctest::Approx(97.0).epsilon(1e-10));
    CHECK(fs[1] == doctest::Approx(100.0).epsilon(1e-10));
    CHECK(fs[2] == doctest::Approx(103.0).epsilon(1e-10));
    CHECK(fs[3] == doctest::Approx(106.0).epsilon(1e-10));
}

TEST_CASE("multiple eigenvalues are all found")
{
    const int n = 80;
    std::vector<Eigen::Triplet<double>> tk, ti;
    for (int j = 0; j < n; ++j) {
        const double f = j < 5 ? 100.0 : 60.0 + 2.0 * j;
        ti.emplace_back(j, j, 1.0);
        tk.emplace_back(j, j, -std::pow(2 * M_PI * f, 2));
    }
    SparseMatrix k(n, n), i(n, n);
    k.setFromTriplets(tk.begin(), tk.end());
    i.setFromTriplets(ti.begin(), ti.end());
    auto search = modes_near(k, i, 1.0, 100.0, 5);
    REQUIRE(search.modes.size() == 5);
    for (const auto& m : search.modes)
        CHECK(m.f_r == doctest::Approx(100.0).epsilon(1e-10));
    Eigen::MatrixXd c(n, 5);
    for (int q = 0; q < 5; ++q)
        c.col(q) = search.modes[q].coeffs;
    CHECK((c.transpose() * c - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("shifted solve matches a dense solve")
{
    const int n = 200;
    SparseMatrix k = random_sym(n, 3);
    SparseMatrix m = random_spd(n, 4);
    const double sigma = 0.37;
    ShiftedFactorization fac(k, m, sigma);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0, 1);
    Eigen::VectorXd b(n);
    for (auto& x : b)
        x = nd(rng);
    Eigen::VectorXd x = fac.solve(b);
    Eigen::MatrixXd a = Eigen::MatrixXd(k) - sigma * Eigen::MatrixXd(m);
    Eigen::VectorXd ref = a.fullPivLu().solve(b);
    CHECK((x - ref).norm() <= 1e-10 * ref.norm());
    CHECK(fac.last_backward_error() <= 1e-12);
    CHECK(fac.negative_pivots() >= 0);
}

TEST_CASE("fill budget is enforced")
{
    SparseMatrix k = random_sym(300, 6);
    SparseMatrix m = random_spd(300, 7);
    FactorizeOptions opt;
    opt.fill_budget = 100;
    CHECK_THROWS_AS(ShiftedFactorization(k, m, 0.1, opt), MemoryBudgetError);
    EigenOptions eo;
    eo.factor = opt;
    CHECK_THROWS_AS(modes_near(k, m, 1.0, 1.0, 2, eo), MemoryBudgetError);
}

TEST_CASE("invalid requests")
{
    SparseMatrix i = random_spd(10, 8);
    CHECK_THROWS_AS(modes_near(i, i, 1.0, -1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(modes_near(i, i, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(modes_near(i, i, 1.0, 1.0, 11), std::invalid_argument);
    SparseMatrix z(10, 10);
    CHECK_THROWS_AS(modes_near(i, z, 1.0, 1.0, 1), FactorizationError);
}

TEST_CASE("cube modes agree with the dense oracle")
{
    auto kp = barycentric_subdivide(generate_slab_mesh(Vec3(0.01, 0.01, 0.01), Vec3(0.01, 0.01, 0.01)));
    ElasticTensor w = spruce_engelmann();
    auto sys = assemble_coarse(kp, w, 1.0);
    const double rho = w.density();
    const Eigen::VectorXd spectrum =
        oracle::dense_pencil_eigenvalues(Eigen::MatrixXd(sys.K), Eigen::MatrixXd(sys.I), rho, oracle::constant_kernel(kp));
    for (double f : {5000.0, 20000.0}) {
        auto search = modes_near(sys.K, sys.I, rho, f, 6);
        const Eigen::VectorXd ref = oracle::nearest(spectrum, search.sigma, 6);
        std::vector<double> mu;
        for (const auto& m : search.modes)
            mu.push_back(m.mu);
        std::sort(mu.begin(), mu.end());
        // K vanishes on interior edge rows, so mu = 0 has high multiplicity
        // and is only resolved to roundoff of |K|.  Accuracy is measured on
        // the shift-inverted value 1 / (mu - sigma).
        double worst = 0, worst_mu = 0;
        for (int q = 0; q < 6; ++q) {
            worst = std::max(worst, std::abs(mu[q] - ref[q]) / std::abs(ref[q] - search.sigma));
            worst_mu = std::max(worst_mu, std::abs(mu[q] - ref[q]) / std::abs(ref[q]));
        }
        MESSAGE("target ", f, " Hz: deviation relative to the shift distance ", worst, ", relative in mu ", worst_mu);
        CHECK(worst <= 1e-8);

        // rho I orthonormality
        double off = 0;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                const double g = search.modes[a].coeffs.dot(rho * (sys.I * search.modes[b].coeffs));
                off = std::max(off, std::abs(g - (a == b ? 1.0 : 0.0)));
            }
        CHECK(off <= 1e-8);
    }
}

TEST_CASE("mode search is deterministic")
{
    auto kp = barycentric_subdivide(generate_slab_mesh(Vec3(0.01, 0.01, 0.01), Vec3(0.01, 0.01, 0.01)));
    auto sys = assemble_coarse(kp, spruce_engelmann(), 1.0);
    auto a = modes_near(sys.K, sys.I, 360, 8000, 3);
    auto b = modes_near(sys.K, sys.I, 360, 8000, 3);
    for (int q = 0; q < 3; ++q) {
        CHECK(std::memcmp(&a.modes[q].mu, &b.modes[q].mu, sizeof(double)) == 0);
        CHECK(std::memcmp(a.modes[q].coeffs.data(), b.modes[q].coeffs.data(),
                          sizeof(double) * a.modes[q].coeffs.size()) == 0);
    }
}
