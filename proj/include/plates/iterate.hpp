#pragma once

#include "plates/assembly.hpp"
#include "plates/boundary_conditions.hpp"
#include "plates/eigensolve.hpp"
#include "plates/resonance.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace plates {

// Operator A of the first iterate on the coarse basis: tet terms with
// lambda = 1 on the face block plus the boundary pairings of the fields
// living on each boundary face of K'.  Symmetric by construction.
SparseMatrix assemble_iterate_operator(const SimplicialComplex3& kp, const BasisIndex& b, const ElasticTensor& w,
                                       Execution ex = Execution::Parallel);

// P1 solution of  Laplace q = rho tr((grad u)^2), q = 0 on the boundary,
// one value per vertex of K'
Eigen::VectorXd pressure_potential(const SimplicialComplex3& kp, const BasisIndex& b, double rho,
                                   const Eigen::VectorXd& u);
// <grad q, W_s>
Eigen::VectorXd pressure_load(const SimplicialComplex3& kp, const BasisIndex& b, const Eigen::VectorXd& q);

// Largest eigenvalue of A c = lambda M c by Lanczos.  The three constant
// field directions make M singular; `pins` are unknowns on which M is
// regularised so the pencil stays definite.
double estimate_max_eigenvalue(const SparseMatrix& a, const SparseMatrix& m, const std::vector<int>& pins,
                               int steps = 40);

struct IterateOptions {
    double safety = 10;  // g = safety * lambda_max(A, I)
    double g = 0;        // fixed gamma^2 rho when positive
    int lanczos_steps = 40;
    FactorizeOptions factor;
};

// R = -<grad q(u)> - rho I v + int F + g I (x + int u) from the running
// time integrals
Eigen::VectorXd iterate_rhs(const SimplicialComplex3& kp, const BasisIndex& b, const SparseMatrix& gram, double rho,
                            double g, const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& int_u,
                            const Eigen::VectorXd& int_f, const Eigen::VectorXd& position);

struct SpectralBoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Z(t) = x + xi(t) with (g I - A) xi = R - g I x, integrals by the
// trapezoid rule from t = 0, xi restricted to the stress-only constrained
// space.  A x vanishes for the exact operator and is dropped, so xi(0) = 0.
struct IterateSolution {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> xi;  // coarse coefficients
    Eigen::VectorXd position;
    double lambda_max = 0;
    double g = 0;  // gamma^2 rho
    int negative_pivots = 0;
    int fine_size = 0;
    std::string factorization;
    std::vector<std::string> warnings;

    Eigen::VectorXd z(int j) const { return position + xi[j]; }
};

IterateSolution first_iterate(const SimplicialComplex3& kp, const ElasticTensor& w, double rho,
                              const ResonanceWave& wave, const ForcingVectors& forcing,
                              const std::vector<double>& times, const IterateOptions& opt = {},
                              Execution ex = Execution::Parallel);

// t_i = i T / n, i = 0..n over one forcing period T
std::vector<double> iterate_times(double omega, int n);

}  // namespace plates
