#pragma once

#include "plates/basis.hpp"
#include "plates/material.hpp"
#include "plates/mesh.hpp"
#include "plates/whitney.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace plates {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Serial is the reference path; Parallel computes local blocks with OpenMP
// and reduces them in the same tet order, so both give identical bits.
enum class Execution { Serial, Parallel };

void set_thread_count(int n);

struct SystemMetadata {
    std::string kind = "coarse";
    double lambda = 1.0;
    Eigen::Vector3d l = Eigen::Vector3d::Zero();
    std::string material;
    std::uint64_t material_hash = 0;
    std::uint64_t mesh_hash = 0;
};

// Gram matrix I and stiffness K over a basis (rho is applied at solve time).
struct SparseSymSystem {
    SparseMatrix I, K;
    BasisIndex basis;
    SystemMetadata meta;
    int size() const { return static_cast<int>(I.rows()); }
};

// local fields of a tet: 6 edges then 4 faces
inline constexpr int kLocalFields = 10;
std::array<int, kLocalFields> local_basis_ids(const SimplicialComplex3& kp, const BasisIndex& b, int t);
std::array<AffineField, kLocalFields> local_fields(const TetGeometry& g);

SparseMatrix assemble_gram(const SimplicialComplex3& kp, const BasisIndex& b, Execution ex = Execution::Parallel);
SparseMatrix assemble_stiffness(const SimplicialComplex3& kp, const BasisIndex& b, const ElasticTensor& w,
                                double lambda, Execution ex = Execution::Parallel);
// tet terms of the stiffness only, on the face block
SparseMatrix assemble_volume_stiffness(const SimplicialComplex3& kp, const BasisIndex& b, const ElasticTensor& w,
                                       double lambda, Execution ex = Execution::Parallel);
SparseSymSystem assemble_coarse(const SimplicialComplex3& kp, const ElasticTensor& w, double lambda,
                                Execution ex = Execution::Parallel);

using VectorField = std::function<Vec3(const Vec3&)>;
// <F, W_s> by a degree 2s+1 Grundmann-Moeller rule on every tet
Eigen::VectorXd load_vector(const SimplicialComplex3& kp, const BasisIndex& b, const VectorField& f, int gm_s = 3,
                            Execution ex = Execution::Parallel);
// exact int W_s dV, component by component (n x 3)
Eigen::MatrixXd basis_integrals(const SimplicialComplex3& kp, const BasisIndex& b);

// A constant vector field lies in both the edge span and the face span, so
// the coarse coefficients are redundant along three directions: column k
// holds (edge circulations of e_k, minus face fluxes of e_k).  I annihilates
// them.
Eigen::MatrixXd constant_field_coefficients(const SimplicialComplex3& kp, const BasisIndex& b);

// coefficients of the position field x, which lies in the face span
Eigen::VectorXd position_coefficients(const SimplicialComplex3& kp, const BasisIndex& b);

// fraction of structurally zero entries
double sparsity_score(const SparseMatrix& m);
double relative_asymmetry(const SparseMatrix& m);

}  // namespace plates
