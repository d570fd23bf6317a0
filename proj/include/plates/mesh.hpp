#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace plates {

using Vec3 = Eigen::Vector3d;

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// parent simplex of a subdivided cell, dim = -1 when absent
struct ParentRef {
    int dim = -1;
    int index = -1;
};

// Oriented tetrahedral complex.  Every simplex is stored with its vertex
// indices ascending; edges and faces carry the orientation of that order.
// Tets are oriented geometrically (positive volume), so tet_sign() records
// how the ascending order relates to that.
class SimplicialComplex3 {
public:
    static SimplicialComplex3 from_tets(std::vector<Vec3> vertices,
                                        std::vector<std::array<int, 4>> tets);

    int num_vertices() const { return static_cast<int>(verts_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_tets() const { return static_cast<int>(tets_.size()); }
    int count(int dim) const;

    int num_boundary_vertices() const { return nbv_; }
    int num_boundary_edges() const { return nbe_; }
    int num_boundary_faces() const { return nbf_; }

    const std::vector<Vec3>& vertices() const { return verts_; }
    const Vec3& vertex(int p) const { return verts_[p]; }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    const std::array<int, 3>& face(int f) const { return faces_[f]; }
    const std::array<int, 4>& tet(int t) const { return tets_[t]; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const std::vector<std::array<int, 4>>& tets() const { return tets_; }

    // +1 if the ascending vertex order of t is positively oriented
    int tet_sign(int t) const { return tet_sign_[t]; }
    double tet_volume(int t) const { return tet_vol_[t]; }
    double total_volume() const;

    // local i-th entry is the sub-simplex opposite local vertex i
    const std::array<int, 4>& tet_faces(int t) const { return tet_faces_[t]; }
    const std::array<int, 6>& tet_edges(int t) const { return tet_edges_[t]; }
    const std::array<int, 3>& face_edges(int f) const { return face_edges_[f]; }
    // second entry is -1 for boundary faces
    const std::array<int, 2>& face_tets(int f) const { return face_tets_[f]; }

    // incidence numbers, zero when not incident
    int b_pe(int p, int e) const;
    int b_ef(int e, int f) const;
    int b_ft(int f, int t) const;

    bool vertex_on_boundary(int p) const { return bv_[p] != 0; }
    bool edge_on_boundary(int e) const { return be_[e] != 0; }
    bool face_on_boundary(int f) const { return bf_[f] != 0; }
    std::vector<int> boundary_faces() const;

    // -1 when absent
    int find_edge(int a, int b) const;
    int find_face(int a, int b, int c) const;

    // lowest-indexed tet containing vertex p
    int first_tet_of_vertex(int p) const { return vertex_tet_[p]; }
    // lowest-indexed tet containing edge e
    int first_tet_of_edge(int e) const { return edge_tet_[e]; }

    // exterior unit normal of a boundary face, from its incident tet
    Vec3 exterior_normal(int f) const;
    double face_area(int f) const;

    int euler_characteristic() const;
    int boundary_euler() const;

    // subdivision links; empty for an unsubdivided complex
    bool is_subdivision() const { return parent_ != nullptr; }
    const SimplicialComplex3& parent() const;
    ParentRef vertex_parent(int p) const { return vertex_parent_.empty() ? ParentRef{} : vertex_parent_[p]; }
    // smallest parent simplex containing the simplex
    ParentRef carrier(int dim, int index) const;
    int tet_parent(int t) const { return carrier(3, t).index; }

    std::uint64_t hash() const;

private:
    friend SimplicialComplex3 barycentric_subdivide(const SimplicialComplex3&);
    void build();

    std::vector<Vec3> verts_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<std::array<int, 4>> tets_;
    std::vector<int> tet_sign_;
    std::vector<double> tet_vol_;
    std::vector<std::array<int, 4>> tet_faces_;
    std::vector<std::array<int, 6>> tet_edges_;
    std::vector<std::array<int, 3>> face_edges_;
    std::vector<std::array<int, 2>> face_tets_;
    std::vector<char> bv_, be_, bf_;
    std::vector<int> vertex_tet_, edge_tet_;
    int nbv_ = 0, nbe_ = 0, nbf_ = 0;

    std::shared_ptr<const SimplicialComplex3> parent_;
    std::vector<ParentRef> vertex_parent_;
};

// local edge k of a tet joins local vertices kTetEdge[k]
inline constexpr int kTetEdge[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

SimplicialComplex3 generate_slab_mesh(const Vec3& extent, const Vec3& block);
SimplicialComplex3 barycentric_subdivide(const SimplicialComplex3& k);

SimplicialComplex3 load_mesh(const std::string& path);
void save_mesh(const SimplicialComplex3& k, const std::string& path);

// Sub-simplices of each boundary face of the parent complex, as they appear
// in a barycentric subdivision.
struct BoundaryFaceSplit {
    int parent_face = -1;
    std::array<int, 12> edges{};
    std::array<int, 6> faces{};
};
std::vector<BoundaryFaceSplit> boundary_face_splits(const SimplicialComplex3& kp);

}  // namespace plates
