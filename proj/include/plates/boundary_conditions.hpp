#pragma once

#include "plates/assembly.hpp"

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <vector>

namespace plates {

struct ConstraintError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Frame on a boundary face of the parent complex: t1 along its longest
// edge, t2 = n x t1, n exterior.
struct FaceFrame {
    Vec3 t1, t2, n;
};
FaceFrame boundary_frame(const SimplicialComplex3& k, int face);

enum class ConstraintKind {
    Traction,      // d_T W . W'(1)N + T . sigma(grad W)N
    StressOnly     // d_T W . W'(1)N
};

// The 2 x 18 block of one boundary face of K over its 12 sub-edges and 6
// sub-faces, and its reduction.
struct ConstraintBlock {
    int parent_face = -1;
    std::array<int, 12> edges{};  // K' edge indices
    std::array<int, 6> faces{};   // K' face indices
    Eigen::Matrix<double, 2, 18> rows;
    double sigma1 = 0, sigma2 = 0;
    // rank of the 2 x 6 face subblock; 0 when it vanishes relative to the
    // whole block, in which case nothing is eliminated
    int rank = 0;
    // eliminated faces (K' indices) and their expressions in the remaining
    // block unknowns: coeff.row(p) over the 12 edges then the 6 faces
    std::vector<int> pivots;
    Eigen::Matrix<double, Eigen::Dynamic, 18> coeff;
    // relative size of the edge part of the null rows
    double null_row_edge_norm = 0;
};

struct ConstraintReduction {
    ConstraintKind kind = ConstraintKind::Traction;
    std::vector<ConstraintBlock> blocks;
    int rank_zero = 0;
    int rank_one = 0;
    int rank_two = 0;
    // null rows of the 2 x 6 face subblocks
    int null_rows() const { return rank_one + 2 * rank_zero; }
};

ConstraintBlock constraint_block(const SimplicialComplex3& kp, const ElasticTensor& w, const BoundaryFaceSplit& split,
                                 ConstraintKind kind);
ConstraintReduction boundary_condition_system(const SimplicialComplex3& kp, const ElasticTensor& w,
                                              ConstraintKind kind = ConstraintKind::Traction,
                                              Execution ex = Execution::Parallel);

// Embedding of the reduced coefficients into the coarse ones.
struct FineEmbedding {
    SparseMatrix P;                  // coarse x fine
    std::vector<int> fine_to_coarse; // coarse id carried by each fine unknown
    BasisIndex basis;                // coarse basis with pivots tagged B
};
FineEmbedding fine_embedding(const BasisIndex& coarse, const ConstraintReduction& red);

// P^T I P and P^T K P, symmetrized
SparseSymSystem assemble_fine(const SparseSymSystem& coarse, const FineEmbedding& emb);

// |E'| + |F'o| + 4 |F_boundary(K)| + r_n, r_n the null row count
int fine_dimension_formula(const SimplicialComplex3& kp, const ConstraintReduction& red);

}  // namespace plates
