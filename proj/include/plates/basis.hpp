#pragma once

#include "plates/mesh.hpp"

#include <vector>

namespace plates {

enum class BasisPart { EdgeInterior, EdgeBoundary, FaceInterior, FaceBoundaryI, FaceBoundaryB };

const char* to_string(BasisPart p);

// Coarse enumeration of the Whitney fields of K': all edges, then all faces,
// each in simplex order.  Boundary faces are tagged FaceBoundaryI until a
// constraint reduction promotes its pivots to FaceBoundaryB.
struct BasisIndex {
    int num_edges = 0;
    int num_faces = 0;
    std::vector<BasisPart> part;

    int size() const { return num_edges + num_faces; }
    int edge_id(int e) const { return e; }
    int face_id(int f) const { return num_edges + f; }
    bool is_edge(int s) const { return s < num_edges; }
    int simplex(int s) const { return s < num_edges ? s : s - num_edges; }
    int count(BasisPart p) const;
};

BasisIndex coarse_basis(const SimplicialComplex3& kp);

}  // namespace plates
