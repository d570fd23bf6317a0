#pragma once

#include "plates/material.hpp"
#include "plates/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <utility>
#include <vector>

namespace plates {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Vertex coordinates (ascending global order) and barycentric gradients.
struct TetGeometry {
    std::array<Vec3, 4> x;
    std::array<Vec3, 4> grad;
    double volume = 0;
};

TetGeometry tet_geometry(const SimplicialComplex3& k, int t);
Eigen::Vector4d barycentric_coords(const TetGeometry& g, const Vec3& p);

// Affine field on one tet, W(x) = sum_k lambda_k(x) v.col(k).  Scalar fields
// use row 0 only.
struct AffineField {
    Eigen::Matrix<double, 3, 4> v = Eigen::Matrix<double, 3, 4>::Zero();

    Vec3 value(const Eigen::Vector4d& lambda) const { return v * lambda; }
    // J(a, j) = d_j W^a
    Eigen::Matrix3d jacobian(const TetGeometry& g) const;
    double divergence(const TetGeometry& g) const { return jacobian(g).trace(); }
    AffineField& add(const AffineField& o, double s)
    {
        v += s * o.v;
        return *this;
    }
};

// W_e for local edge kTetEdge[l]
AffineField edge_field(const TetGeometry& g, int local_edge);
// W_f for the face opposite local vertex i
AffineField face_field(const TetGeometry& g, int opposite_vertex);

enum class FieldKind { Vertex, Edge, Face, Tet };

struct WhitneyField {
    FieldKind kind;
    int owner;
};

using FieldCombination = std::vector<std::pair<WhitneyField, double>>;

bool is_scalar(FieldKind k);
// tets of the closed star of the owning simplex, ascending
std::vector<int> support_tets(const SimplicialComplex3& k, const WhitneyField& w);
// false when t is outside the support
bool restrict_to_tet(const SimplicialComplex3& k, const WhitneyField& w, int t, const TetGeometry& g,
                     AffineField& out);

// Finds the lowest-indexed tet containing a point.
class PointLocator {
public:
    explicit PointLocator(const SimplicialComplex3& k);
    // throws DomainError outside the polytope
    int locate(const Vec3& p, Eigen::Vector4d* lambda = nullptr) const;

private:
    const SimplicialComplex3& k_;
    Vec3 lo_, hi_;
    std::array<int, 3> n_{};
    std::vector<std::vector<int>> cells_;
    int cell_of(const Vec3& p, int axis) const;
};

double eval_scalar(const SimplicialComplex3& k, const PointLocator& loc, const WhitneyField& w, const Vec3& p);
Vec3 eval_vector(const SimplicialComplex3& k, const PointLocator& loc, const WhitneyField& w, const Vec3& p);

enum class Pairing { Dot, GradGrad, DivDiv, WeightedDiv };

// Exact L2(Omega) pairing.  GradGrad needs a tensor, WeightedDiv uses its
// l constants: int (sum_i l_i d_i a^i) div b.
double integrate_pairing(const SimplicialComplex3& k, const FieldCombination& a, const FieldCombination& b,
                         Pairing kind, const ElasticTensor* w = nullptr);

// Integrands over a boundary face with exterior normal N:
//   Dot                a.b
//   NormalNormal       (a.N)(b.N)
//   TractionDot        (sigma(grad b)N).a
//   TractionNormal     (N.sigma(grad b)N)(a.N)
//   NormalDerivNormal  (N.(d_N b))(a.N)
//   DivNormal          div(b)(a.N)
//   BoundaryStress     (W'(1)N.a)(N.b)
enum class BoundaryPairing { Dot, NormalNormal, TractionDot, TractionNormal, NormalDerivNormal, DivNormal, BoundaryStress };

// Boundary face seen from its incident tet.
struct BoundaryFace {
    int face = -1;
    int tet = -1;
    int opposite = -1;  // local index of the tet vertex off the face
    double area = 0;
    Vec3 normal;
};
BoundaryFace boundary_face(const SimplicialComplex3& k, int f);

// exact face integrals of affine fields restricted to the face
Vec3 face_integral(const AffineField& a, const BoundaryFace& bf);
double face_pairing(const AffineField& a, const AffineField& b, const TetGeometry& g, const BoundaryFace& bf,
                    BoundaryPairing kind, const ElasticTensor* w);

double boundary_pairing(const SimplicialComplex3& k, const FieldCombination& a, const FieldCombination& b,
                        BoundaryPairing kind, int face, const ElasticTensor* w = nullptr);

// grad: Fun -> Grad (b_pe), curl: Grad -> Div (b_ef), div: Div -> Char (b_ft)
struct ChainOperators {
    Eigen::SparseMatrix<double> grad, curl, div;
};
ChainOperators chain_operators(const SimplicialComplex3& k);

enum class ChainOp { Grad, Curl, Div };
Eigen::VectorXd apply_chain(const ChainOperators& ops, ChainOp op, const Eigen::VectorXd& c);

}  // namespace plates
