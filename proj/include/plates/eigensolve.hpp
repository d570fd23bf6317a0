#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace plates {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct FactorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MemoryBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, std::vector<double> best) : std::runtime_error(what), residuals(std::move(best)) {}
    std::vector<double> residuals;
};

struct FactorizeOptions {
    // nonzeros allowed in the factor
    double fill_budget = 6e8;
    double backward_tol = 1e-12;
    int refinement_steps = 3;
};

// Direct solver for (K - sigma M).  LDL^T with AMD ordering, iterative
// refinement, and a sparse LU fallback when the LDL^T residual check fails.
class ShiftedFactorization {
public:
    ShiftedFactorization(const SparseMatrix& k, const SparseMatrix& m, double sigma, const FactorizeOptions& opt = {});
    ~ShiftedFactorization();
    ShiftedFactorization(const ShiftedFactorization&) = delete;
    ShiftedFactorization& operator=(const ShiftedFactorization&) = delete;

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    // normwise backward error of the last solve
    double last_backward_error() const { return last_eta_; }
    double sigma() const { return sigma_; }
    const std::string& method() const { return method_; }
    double fill() const { return fill_; }
    int negative_pivots() const { return negative_pivots_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    SparseMatrix a_;
    double sigma_ = 0;
    double norm_a_ = 0;
    double fill_ = 0;
    int negative_pivots_ = -1;
    std::string method_;
    FactorizeOptions opt_;
    mutable double last_eta_ = 0;
};

// Factorization with one retry at sigma (1 + 1e-8) on breakdown.
std::unique_ptr<ShiftedFactorization> factorize_shifted(const SparseMatrix& k, const SparseMatrix& m, double sigma,
                                                        const FactorizeOptions& opt = {}, bool* perturbed = nullptr);

struct ModeResult {
    double mu = 0;
    double f_r = 0;          // sqrt(|mu|) / 2 pi
    bool oscillatory = true; // mu < 0; positive mu decays
    Eigen::VectorXd coeffs;  // c^T (rho I) c = 1
    double residual = 0;     // |K c - mu rho I c| / |rho I c|
    // |K c - mu rho I c| / ((|K| + |mu| |rho I|) |c|)
    double backward_error = 0;
    std::string norm_kind = "rhoI";
};

struct EigenOptions {
    double tol = 1e-10;
    int krylov_dim = 0;  // 0 picks a size from the mode count
    std::uint64_t seed = 12345;  // start and deflation vectors
    FactorizeOptions factor;
};

struct ModeSearch {
    std::vector<ModeResult> modes;
    double sigma = 0;
    bool shift_perturbed = false;
    int restarts = 0;
    int deflation_passes = 0;
    int operator_applications = 0;
    std::string factorization;
};

// The `count` eigenpairs of K c = mu (rho I) c with mu closest to
// -(2 pi f_target)^2, by shift-invert Lanczos in the rho I inner product
// with deflated reruns for multiple eigenvalues.
ModeSearch modes_near(const SparseMatrix& k, const SparseMatrix& i, double rho, double f_target, int count,
                      const EigenOptions& opt = {});

}  // namespace plates
