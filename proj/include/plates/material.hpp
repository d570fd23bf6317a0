#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace plates {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

struct MaterialError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Axes (1, 2, 3) = (r, theta, z).  mu_a_b is the Poisson ratio for
// contraction along b under tension along a.
struct EngineeringConstants {
    double e_r = 0, e_theta = 0, e_z = 0;
    double g_theta_z = 0, g_rz = 0, g_r_theta = 0;
    double mu_r_theta = 0, mu_theta_r = 0;
    double mu_r_z = 0, mu_z_r = 0;
    double mu_theta_z = 0, mu_z_theta = 0;
};

// Orthotropic Hooke tensor in Voigt order (11, 22, 33, 23, 13, 12), Pa.
class ElasticTensor {
public:
    ElasticTensor() = default;
    ElasticTensor(const Matrix6d& voigt, double density, std::string name = "custom");

    const Matrix6d& voigt() const { return c_; }
    double density() const { return rho_; }
    const std::string& name() const { return name_; }

    // C_ijkl, zero-based
    double operator()(int i, int j, int k, int l) const;
    Eigen::Matrix3d normal_block() const { return c_.topLeftCorner<3, 3>(); }
    Eigen::Vector3d shear_diagonal() const { return c_.diagonal().tail<3>(); }

    // sigma_ai = C_aibj d_j u^b for grad(a, j) = d_j u^a
    Eigen::Matrix3d stress(const Eigen::Matrix3d& grad) const;
    Eigen::Vector3d traction(const Eigen::Matrix3d& grad, const Eigen::Vector3d& n) const
    {
        return stress(grad) * n;
    }
    // sum_{a,i,b,j} ga(a,i) C_iajb gb(b,j)
    double contract(const Eigen::Matrix3d& ga, const Eigen::Matrix3d& gb) const;
    // W'(1)N, the boundary contraction at the identity
    Eigen::Vector3d boundary_contraction(const Eigen::Vector3d& n) const;

    Eigen::Vector3d l_constants() const;
    bool has_l_override() const { return l_override_.has_value(); }
    void set_l_override(const Eigen::Vector3d& l) { l_override_ = l; }

    std::uint64_t hash() const;

private:
    Matrix6d c_ = Matrix6d::Zero();
    double rho_ = 0;
    std::string name_;
    std::optional<Eigen::Vector3d> l_override_;
};

// Builds the compliance, replaces each reciprocal pair mu_ij/e_i, mu_ji/e_j
// by its mean, and inverts.
ElasticTensor tensor_from_engineering(const EngineeringConstants& k, double density, std::string name = "custom");
// Inverse of tensor_from_engineering for tensors whose compliance is symmetric.
EngineeringConstants engineering_from_tensor(const ElasticTensor& w);

// sorted eigenvalues of the normal block followed by the sorted shear diagonal
Eigen::Matrix<double, 6, 1> coercivity_spectrum(const ElasticTensor& w);

// plain mean of the three second-order coefficients of each L_i(D)
Eigen::Vector3d weighted_divergence_constants(const ElasticTensor& w);

EngineeringConstants spruce_engelmann_constants();
ElasticTensor spruce_engelmann();
ElasticTensor isotropic(double e, double g, double nu = 0.0, double density = 1000.0);

// "spruce-engelmann" or "isotropic:e,g[,nu[,rho]]"
ElasticTensor material_preset(const std::string& id);
// key = value file, see README
ElasticTensor load_material_file(const std::string& path);

enum class LambdaPreset { One, MeanL };
LambdaPreset parse_lambda_preset(const std::string& s);
std::string to_string(LambdaPreset p);
double lambda_value(LambdaPreset p, const ElasticTensor& w);

}  // namespace plates
