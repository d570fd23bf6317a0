#include "plates/boundary_conditions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace plates {

FaceFrame boundary_frame(const SimplicialComplex3& k, int face)
{
    FaceFrame fr;
    fr.n = k.exterior_normal(face);
    int best = -1;
    double len = -1;
    for (int e : k.face_edges(face)) {
        double l = (k.vertex(k.edge(e)[1]) - k.vertex(k.edge(e)[0])).norm();
        if (l > len * (1 + 1e-12)) {
            len = l;
            best = e;
        }
    }
    Vec3 t = k.vertex(k.edge(best)[1]) - k.vertex(k.edge(best)[0]);
    t -= t.dot(fr.n) * fr.n;
    fr.t1 = t.normalized();
    fr.t2 = fr.n.cross(fr.t1);
    return fr;
}

ConstraintBlock constraint_block(const SimplicialComplex3& kp, const ElasticTensor& w, const BoundaryFaceSplit& split,
                                 ConstraintKind kind)
{
    const SimplicialComplex3& k = kp.parent();
    ConstraintBlock blk;
    blk.parent_face = split.parent_face;
    blk.edges = split.edges;
    blk.faces = split.faces;
    blk.rows.setZero();

    FaceFrame fr = boundary_frame(k, split.parent_face);
    const Vec3 wn = w.boundary_contraction(fr.n);
    const Vec3 tangents[2] = {fr.t1, fr.t2};
    auto add = [&](int col, const Eigen::Matrix3d& j, double area) {
        for (int a = 0; a < 2; ++a) {
            double v = (j * tangents[a]).dot(wn);
            if (kind == ConstraintKind::Traction)
                v += tangents[a].dot(w.traction(j, fr.n));
            blk.rows(a, col) += area * v;
        }
    };

    for (int s = 0; s < 6; ++s) {
        BoundaryFace bf = boundary_face(kp, split.faces[s]);
        TetGeometry g = tet_geometry(kp, bf.tet);
        add(12 + s, face_field(g, bf.opposite).jacobian(g), bf.area);
        for (int l = 0; l < 6; ++l) {
            if (kTetEdge[l][0] == bf.opposite || kTetEdge[l][1] == bf.opposite)
                continue;
            int e = kp.tet_edges(bf.tet)[l];
            auto it = std::find(split.edges.begin(), split.edges.end(), e);
            if (it == split.edges.end())
                throw ConstraintError("sub-face edge missing from its block");
            add(static_cast<int>(it - split.edges.begin()), edge_field(g, l).jacobian(g), bf.area);
        }
    }

    Eigen::Matrix<double, 2, 6> fb = blk.rows.rightCols<6>();
    Eigen::JacobiSVD<Eigen::Matrix<double, 2, 6>> svd(fb, Eigen::ComputeFullU);
    blk.sigma1 = svd.singularValues()[0];
    blk.sigma2 = svd.singularValues()[1];
    const double scale = blk.rows.norm();
    if (!(scale > 0))
        throw ConstraintError("vanishing constraint block on boundary face " + std::to_string(split.parent_face));
    if (blk.sigma1 <= 1e-10 * scale)
        blk.rank = 0;
    else
        blk.rank = blk.sigma2 <= 1e-10 * blk.sigma1 ? 1 : 2;

    if (blk.rank == 0) {
        blk.coeff.resize(0, 18);
        blk.null_row_edge_norm = blk.rows.leftCols<12>().norm() / scale;
    } else if (blk.rank == 2) {
        int bp = 0, bq = 1;
        double best = -1;
        for (int p = 0; p < 6; ++p)
            for (int q = p + 1; q < 6; ++q) {
                double d = std::abs(fb(0, p) * fb(1, q) - fb(0, q) * fb(1, p));
                if (d > best) {
                    best = d;
                    bp = p;
                    bq = q;
                }
            }
        Eigen::Matrix2d fbb;
        fbb << fb(0, bp), fb(0, bq), fb(1, bp), fb(1, bq);
        Eigen::Matrix<double, 2, 18> rest = blk.rows;
        rest.col(12 + bp).setZero();
        rest.col(12 + bq).setZero();
        blk.coeff = -fbb.inverse() * rest;
        blk.pivots = {split.faces[bp], split.faces[bq]};
    } else {
        Eigen::Matrix<double, 1, 18> r = svd.matrixU().col(0).transpose() * blk.rows;
        int bp = 0;
        for (int p = 1; p < 6; ++p)
            if (std::abs(r(12 + p)) > std::abs(r(12 + bp)))
                bp = p;
        double piv = r(12 + bp);
        r(12 + bp) = 0;
        blk.coeff = -r / piv;
        blk.pivots = {split.faces[bp]};
        Eigen::Matrix<double, 1, 18> null_row = svd.matrixU().col(1).transpose() * blk.rows;
        blk.null_row_edge_norm = null_row.leftCols<12>().norm() / scale;
    }
    return blk;
}

ConstraintReduction boundary_condition_system(const SimplicialComplex3& kp, const ElasticTensor& w,
                                              ConstraintKind kind, Execution ex)
{
    std::vector<BoundaryFaceSplit> splits = boundary_face_splits(kp);
    const int n = static_cast<int>(splits.size());
    ConstraintReduction red;
    red.kind = kind;
    red.blocks.resize(n);
    if (ex == Execution::Parallel) {
        std::vector<std::string> errors(n);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            try {
                red.blocks[i] = constraint_block(kp, w, splits[i], kind);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
        for (const auto& e : errors)
            if (!e.empty())
                throw ConstraintError(e);
    } else {
        for (int i = 0; i < n; ++i)
            red.blocks[i] = constraint_block(kp, w, splits[i], kind);
    }
    for (const auto& b : red.blocks)
        (b.rank == 0 ? red.rank_zero : b.rank == 1 ? red.rank_one : red.rank_two)++;
    return red;
}

FineEmbedding fine_embedding(const BasisIndex& coarse, const ConstraintReduction& red)
{
    FineEmbedding emb;
    emb.basis = coarse;
    for (const auto& b : red.blocks)
        for (int f : b.pivots)
            emb.basis.part[coarse.face_id(f)] = BasisPart::FaceBoundaryB;

    std::vector<int> fine_of(coarse.size(), -1);
    for (int s = 0; s < coarse.size(); ++s)
        if (emb.basis.part[s] != BasisPart::FaceBoundaryB) {
            fine_of[s] = static_cast<int>(emb.fine_to_coarse.size());
            emb.fine_to_coarse.push_back(s);
        }

    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < static_cast<int>(emb.fine_to_coarse.size()); ++j)
        trip.emplace_back(emb.fine_to_coarse[j], j, 1.0);
    for (const auto& b : red.blocks)
        for (std::size_t p = 0; p < b.pivots.size(); ++p) {
            int row = coarse.face_id(b.pivots[p]);
            for (int c = 0; c < 18; ++c) {
                double v = b.coeff(static_cast<int>(p), c);
                if (v == 0.0)
                    continue;
                int x = c < 12 ? coarse.edge_id(b.edges[c]) : coarse.face_id(b.faces[c - 12]);
                if (fine_of[x] < 0)
                    throw ConstraintError("constraint couples two eliminated faces");
                trip.emplace_back(row, fine_of[x], v);
            }
        }
    emb.P.resize(coarse.size(), static_cast<int>(emb.fine_to_coarse.size()));
    emb.P.setFromTriplets(trip.begin(), trip.end());
    return emb;
}

namespace {

SparseMatrix congruence(const SparseMatrix& a, const SparseMatrix& p)
{
    SparseMatrix pt = p.transpose();
    SparseMatrix ap = a * p;
    SparseMatrix r = pt * ap;
    SparseMatrix rt = r.transpose();
    SparseMatrix s = 0.5 * (r + rt);
    return s;
}

}  // namespace

SparseSymSystem assemble_fine(const SparseSymSystem& coarse, const FineEmbedding& emb)
{
    if (emb.P.rows() != coarse.size())
        throw ConstraintError("embedding has " + std::to_string(emb.P.rows()) + " rows, system has " +
                              std::to_string(coarse.size()));
    SparseSymSystem fine;
    fine.I = congruence(coarse.I, emb.P);
    fine.K = congruence(coarse.K, emb.P);
    fine.basis = emb.basis;
    fine.meta = coarse.meta;
    fine.meta.kind = "fine";
    return fine;
}

int fine_dimension_formula(const SimplicialComplex3& kp, const ConstraintReduction& red)
{
    int interior_faces = kp.num_faces() - kp.num_boundary_faces();
    return kp.num_edges() + interior_faces + 4 * kp.parent().num_boundary_faces() + red.null_rows();
}

}  // namespace plates
