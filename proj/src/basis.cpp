#include "plates/basis.hpp"

#include <algorithm>

namespace plates {

const char* to_string(BasisPart p)
{
    switch (p) {
    case BasisPart::EdgeInterior: return "edge-interior";
    case BasisPart::EdgeBoundary: return "edge-boundary";
    case BasisPart::FaceInterior: return "face-interior";
    case BasisPart::FaceBoundaryI: return "face-boundary-I";
    case BasisPart::FaceBoundaryB: return "face-boundary-B";
    }
    return "?";
}

int BasisIndex::count(BasisPart p) const
{
    return static_cast<int>(std::count(part.begin(), part.end(), p));
}

BasisIndex coarse_basis(const SimplicialComplex3& kp)
{
    BasisIndex b;
    b.num_edges = kp.num_edges();
    b.num_faces = kp.num_faces();
    b.part.reserve(b.size());
    for (int e = 0; e < kp.num_edges(); ++e)
        b.part.push_back(kp.edge_on_boundary(e) ? BasisPart::EdgeBoundary : BasisPart::EdgeInterior);
    for (int f = 0; f < kp.num_faces(); ++f)
        b.part.push_back(kp.face_on_boundary(f) ? BasisPart::FaceBoundaryI : BasisPart::FaceInterior);
    return b;
}

}  // namespace plates
