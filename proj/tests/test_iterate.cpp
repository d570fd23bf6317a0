#include <doctest.h>

#include "oracles/weak_form.hpp"
#include "plates/assembly.hpp"
#include "plates/iterate.hpp"

#include <random>

using namespace plates;

namespace {

SimplicialComplex3 cube_kp()
{
    return barycentric_subdivide(generate_slab_mesh(Vec3(0.01, 0.01, 0.01), Vec3(0.01, 0.01, 0.01)));
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0, 1);
    Eigen::VectorXd v(n);
    for (auto& x : v)
        x = d(rng);
    return v;
}

}  // namespace

TEST_CASE("iterate operator is symmetric with the expected zero blocks")
{
    auto kp = cube_kp();
    auto b = coarse_basis(kp);
    SparseMatrix a = assemble_iterate_operator(kp, b, spruce_engelmann());
    CHECK(relative_asymmetry(a) <= 1e-12);
    // interior edges meet boundary faces only; boundary edges meet everything
    int interior_edge_bad = 0, edge_interior_face = 0, boundary_edges = 0;
    for (int j = 0; j < a.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
            if (it.value() == 0.0)
                continue;
            const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
            const bool re = b.is_edge(r), ce = b.is_edge(c);
            if (re && !kp.edge_on_boundary(b.simplex(r)) && !(!ce && kp.face_on_boundary(b.simplex(c))))
                ++interior_edge_bad;
            if (re && kp.edge_on_boundary(b.simplex(r)) && !ce && !kp.face_on_boundary(b.simplex(c)))
                ++edge_interior_face;
            if (re && ce)
                ++boundary_edges;
        }
    CHECK(interior_edge_bad == 0);
    CHECK(edge_interior_face > 0);
    CHECK(boundary_edges > 0);
}

TEST_CASE("iterate operator matches Monte Carlo")
{
    auto kp = cube_kp();
    ElasticTensor w = spruce_engelmann();
    auto b = coarse_basis(kp);
    SparseMatrix a = assemble_iterate_operator(kp, b, w);
    oracle::Options opt;
    double worst = 0;
    for (int trial = 0; trial < 3; ++trial) {
        const Eigen::VectorXd u = random_vector(b.size(), 300 + trial);
        opt.seed = 77 + trial;
        const double qa = u.dot(a * u);
        const double mc = oracle::quadratic_form(kp, w, u, oracle::Form::Iterate, opt);
        worst = std::max(worst, std::abs(mc - qa) / std::abs(qa));
    }
    MESSAGE("iterate form, worst relative deviation: ", worst);
    CHECK(worst <= 1e-4);
}

TEST_CASE("pressure potential")
{
    auto kp = cube_kp();
    auto b = coarse_basis(kp);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(b.size());
    CHECK(pressure_potential(kp, b, 400, zero).isZero(0.0));
    CHECK(pressure_load(kp, b, Eigen::VectorXd::Zero(kp.num_vertices())).isZero(0.0));

    // u = x has grad u = Id, so Laplace q = 3 rho > 0 and q <= 0 inside
    Eigen::VectorXd q = pressure_potential(kp, b, 400, position_coefficients(kp, b));
    int interior = 0;
    for (int p = 0; p < kp.num_vertices(); ++p) {
        if (kp.vertex_on_boundary(p)) {
            CHECK(q[p] == 0.0);
        } else {
            CHECK(q[p] < 0.0);
            ++interior;
        }
    }
    CHECK(interior > 0);
}

TEST_CASE("iterate right-hand side and initial value")
{
    auto kp = cube_kp();
    ElasticTensor w = spruce_engelmann();
    auto sys = assemble_coarse(kp, w, 1.0);
    const int n = sys.size();
    const Eigen::VectorXd x = position_coefficients(kp, sys.basis);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    const double g = 3.5e9;
    Eigen::VectorXd r = iterate_rhs(kp, sys.basis, sys.I, w.density(), g, z, z, z, z, x);
    Eigen::VectorXd ref = g * (sys.I * x);
    CHECK((r - ref).cwiseAbs().maxCoeff() <= 1e-14 * ref.cwiseAbs().maxCoeff());

    ForcingSpec spec;
    spec.frequency = 5000;
    auto fv = forcing_load_vectors(kp, sys.basis, spec);
    std::vector<ModeResult> modes(1);
    modes[0].f_r = 4000;
    modes[0].mu = -std::pow(2 * M_PI * 4000, 2);
    ResonanceWave wave = resonance_wave(sys.K, sys.I, w.density(), 5000, modes, fv.c1, fv.c2);
    wave.apply_prefactor = false;
    auto times = iterate_times(wave.omega, 4);
    CHECK(times.size() == 5);
    CHECK(times.back() == doctest::Approx(1.0 / 5000));
    IterateSolution sol = first_iterate(kp, w, w.density(), wave, fv, times);
    REQUIRE(sol.xi.size() == 5);
    CHECK(sol.xi[0].isZero(0.0));
    CHECK((sol.z(0) - x).isZero(0.0));
    CHECK(sol.g > sol.lambda_max);
    for (const auto& xi : sol.xi)
        CHECK(xi.allFinite());

    // no wave and no forcing: xi stays zero
    ForcingVectors none;
    none.c1 = none.c2 = Eigen::VectorXd::Zero(n);
    ResonanceWave still = resonance_wave(sys.K, sys.I, w.density(), 5000, {}, none.c1, none.c2);
    IterateSolution rest = first_iterate(kp, w, w.density(), still, none, times);
    for (const auto& xi : rest.xi)
        CHECK(xi.isZero(0.0));

    IterateOptions bad;
    bad.g = 0.5 * std::abs(sol.lambda_max);
    CHECK_THROWS_AS(first_iterate(kp, w, w.density(), wave, fv, times, bad), SpectralBoundError);
    CHECK_THROWS_AS(first_iterate(kp, w, w.density(), wave, fv, {0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(iterate_times(wave.omega, 0), std::invalid_argument);
}
