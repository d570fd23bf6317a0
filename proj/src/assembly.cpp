#include "plates/assembly.hpp"
#include "plates/quadrature.hpp"

#include <Eigen/Geometry>

#include <omp.h>

#include <cmath>

namespace plates {

using Triplet = Eigen::Triplet<double>;

void set_thread_count(int n)
{
    if (n > 0)
        omp_set_num_threads(n);
    // dense kernels stay serial so results do not depend on n
    Eigen::setNbThreads(1);
}

std::array<int, kLocalFields> local_basis_ids(const SimplicialComplex3& kp, const BasisIndex& b, int t)
{
    std::array<int, kLocalFields> ids{};
    for (int l = 0; l < 6; ++l)
        ids[l] = b.edge_id(kp.tet_edges(t)[l]);
    for (int i = 0; i < 4; ++i)
        ids[6 + i] = b.face_id(kp.tet_faces(t)[i]);
    return ids;
}

std::array<AffineField, kLocalFields> local_fields(const TetGeometry& g)
{
    std::array<AffineField, kLocalFields> f;
    for (int l = 0; l < 6; ++l)
        f[l] = edge_field(g, l);
    for (int i = 0; i < 4; ++i)
        f[6 + i] = face_field(g, i);
    return f;
}

namespace {

using LocalMatrix = Eigen::Matrix<double, kLocalFields, kLocalFields>;

struct LocalBlock {
    std::array<int, kLocalFields> ids;
    LocalMatrix m;
};

LocalBlock gram_kernel(const SimplicialComplex3& kp, const BasisIndex& b, int t)
{
    TetGeometry g = tet_geometry(kp, t);
    auto f = local_fields(g);
    LocalBlock out{local_basis_ids(kp, b, t), LocalMatrix::Zero()};
    Eigen::Matrix4d mass = Eigen::Matrix4d::Constant(g.volume / 20.0);
    mass.diagonal().setConstant(g.volume / 10.0);
    for (int a = 0; a < kLocalFields; ++a)
        for (int c = a; c < kLocalFields; ++c) {
            double s = (f[a].v.transpose() * f[c].v).cwiseProduct(mass).sum();
            out.m(a, c) = out.m(c, a) = s;
        }
    return out;
}

LocalBlock stiffness_kernel(const SimplicialComplex3& kp, const BasisIndex& b, const ElasticTensor& w,
                            const Eigen::Vector3d& l, double lambda, int t)
{
    TetGeometry g = tet_geometry(kp, t);
    LocalBlock out{local_basis_ids(kp, b, t), LocalMatrix::Zero()};
    std::array<Eigen::Matrix3d, 4> j;
    std::array<double, 4> div{}, wdiv{};
    for (int i = 0; i < 4; ++i) {
        j[i] = face_field(g, i).jacobian(g);
        div[i] = j[i].trace();
        wdiv[i] = l[0] * j[i](0, 0) + l[1] * j[i](1, 1) + l[2] * j[i](2, 2);
    }
    for (int a = 0; a < 4; ++a)
        for (int c = a; c < 4; ++c) {
            double s = -w.contract(j[a], j[c]) - lambda * div[a] * div[c] + 0.5 * (wdiv[a] * div[c] + wdiv[c] * div[a]);
            out.m(6 + a, 6 + c) = out.m(6 + c, 6 + a) = g.volume * s;
        }
    return out;
}

// boundary face phi with its three edges: entries (edge, phi) and (phi, phi)
struct BoundaryBlock {
    std::array<int, 3> edge_ids;
    int face_id;
    std::array<double, 3> edge_face;
    double face_face;
};

BoundaryBlock boundary_kernel(const SimplicialComplex3& kp, const BasisIndex& b, const ElasticTensor& w, int f)
{
    BoundaryFace bf = boundary_face(kp, f);
    TetGeometry g = tet_geometry(kp, bf.tet);
    AffineField wf = face_field(g, bf.opposite);
    const Vec3& n = bf.normal;
    const double wnn = w.boundary_contraction(n).dot(n);
    auto term = [&](const AffineField& s) {
        return face_pairing(s, wf, g, bf, BoundaryPairing::TractionDot, &w) -
               face_pairing(s, wf, g, bf, BoundaryPairing::TractionNormal, &w) -
               wnn * (face_pairing(s, wf, g, bf, BoundaryPairing::NormalDerivNormal, &w) +
                      face_pairing(wf, s, g, bf, BoundaryPairing::NormalDerivNormal, &w));
    };
    BoundaryBlock out{};
    out.face_id = b.face_id(f);
    int n_e = 0;
    for (int l = 0; l < 6; ++l) {
        if (kTetEdge[l][0] == bf.opposite || kTetEdge[l][1] == bf.opposite)
            continue;
        out.edge_ids[n_e] = b.edge_id(kp.tet_edges(bf.tet)[l]);
        out.edge_face[n_e] = 0.5 * term(edge_field(g, l));
        ++n_e;
    }
    out.face_face = face_pairing(wf, wf, g, bf, BoundaryPairing::TractionDot, &w) -
                    (face_pairing(wf, wf, g, bf, BoundaryPairing::TractionNormal, &w) +
                     wnn * face_pairing(wf, wf, g, bf, BoundaryPairing::NormalDerivNormal, &w));
    return out;
}

void push_local(std::vector<Triplet>& trip, const LocalBlock& blk, bool faces_only)
{
    int a0 = faces_only ? 6 : 0;
    for (int a = a0; a < kLocalFields; ++a)
        for (int c = a0; c < kLocalFields; ++c)
            trip.emplace_back(blk.ids[a], blk.ids[c], blk.m(a, c));
}

template <class Kernel>
std::vector<LocalBlock> run_tets(int nt, Execution ex, Kernel&& kernel)
{
    std::vector<LocalBlock> blocks(nt);
    if (ex == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < nt; ++t)
            blocks[t] = kernel(t);
    } else {
        for (int t = 0; t < nt; ++t)
            blocks[t] = kernel(t);
    }
    return blocks;
}

}  // namespace

SparseMatrix assemble_gram(const SimplicialComplex3& kp, const BasisIndex& b, Execution ex)
{
    const int nt = kp.num_tets();
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(nt) * kLocalFields * kLocalFields);
    if (ex == Execution::Serial) {
        for (int t = 0; t < nt; ++t)
            push_local(trip, gram_kernel(kp, b, t), false);
    } else {
        auto blocks = run_tets(nt, ex, [&](int t) { return gram_kernel(kp, b, t); });
        for (const auto& blk : blocks)
            push_local(trip, blk, false);
    }
    SparseMatrix m(b.size(), b.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

namespace {

void push_volume_stiffness(std::vector<Triplet>& trip, const SimplicialComplex3& kp, const BasisIndex& b,
                           const ElasticTensor& w, double lambda, Execution ex)
{
    const int nt = kp.num_tets();
    const Eigen::Vector3d l = w.l_constants();
    if (ex == Execution::Serial) {
        for (int t = 0; t < nt; ++t)
            push_local(trip, stiffness_kernel(kp, b, w, l, lambda, t), true);
    } else {
        auto blocks = run_tets(nt, ex, [&](int t) { return stiffness_kernel(kp, b, w, l, lambda, t); });
        for (const auto& blk : blocks)
            push_local(trip, blk, true);
    }
}

}  // namespace

SparseMatrix assemble_volume_stiffness(const SimplicialComplex3& kp, const BasisIndex& b, const ElasticTensor& w,
                                       double lambda, Execution ex)
{
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(kp.num_tets()) * 16);
    push_volume_stiffness(trip, kp, b, w, lambda, ex);
    SparseMatrix m(b.size(), b.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

SparseMatrix assemble_stiffness(const SimplicialComplex3& kp, const BasisIndex& b, const ElasticTensor& w,
                                double lambda, Execution ex)
{
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(kp.num_tets()) * 16 + 7 * static_cast<std::size_t>(kp.num_boundary_faces()));
    push_volume_stiffness(trip, kp, b, w, lambda, ex);

    std::vector<int> bfaces = kp.boundary_faces();
    const int nb = static_cast<int>(bfaces.size());
    std::vector<BoundaryBlock> bblocks(nb);
    if (ex == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < nb; ++i)
            bblocks[i] = boundary_kernel(kp, b, w, bfaces[i]);
    } else {
        for (int i = 0; i < nb; ++i)
            bblocks[i] = boundary_kernel(kp, b, w, bfaces[i]);
    }
    for (const auto& bb : bblocks) {
        for (int i = 0; i < 3; ++i) {
            trip.emplace_back(bb.edge_ids[i], bb.face_id, bb.edge_face[i]);
            trip.emplace_back(bb.face_id, bb.edge_ids[i], bb.edge_face[i]);
        }
        trip.emplace_back(bb.face_id, bb.face_id, bb.face_face);
    }
    SparseMatrix m(b.size(), b.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

SparseSymSystem assemble_coarse(const SimplicialComplex3& kp, const ElasticTensor& w, double lambda, Execution ex)
{
    SparseSymSystem s;
    s.basis = coarse_basis(kp);
    s.I = assemble_gram(kp, s.basis, ex);
    s.K = assemble_stiffness(kp, s.basis, w, lambda, ex);
    s.meta.kind = "coarse";
    s.meta.lambda = lambda;
    s.meta.l = w.l_constants();
    s.meta.material = w.name();
    s.meta.material_hash = w.hash();
    s.meta.mesh_hash = kp.hash();
    return s;
}

Eigen::VectorXd load_vector(const SimplicialComplex3& kp, const BasisIndex& b, const VectorField& f, int gm_s,
                            Execution ex)
{
    const SimplexRule& rule = grundmann_moeller_tet(gm_s);
    const int nt = kp.num_tets();
    using Local = Eigen::Matrix<double, kLocalFields, 1>;
    auto kernel = [&](int t) {
        TetGeometry g = tet_geometry(kp, t);
        auto fields = local_fields(g);
        Local out = Local::Zero();
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Eigen::Vector4d& lam = rule.points[q];
            Vec3 x = lam[0] * g.x[0] + lam[1] * g.x[1] + lam[2] * g.x[2] + lam[3] * g.x[3];
            Vec3 fx = f(x);
            for (int a = 0; a < kLocalFields; ++a)
                out[a] += rule.weights[q] * fx.dot(fields[a].value(lam));
        }
        return Local(out * g.volume);
    };
    std::vector<Local> local(nt);
    if (ex == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < nt; ++t)
            local[t] = kernel(t);
    } else {
        for (int t = 0; t < nt; ++t)
            local[t] = kernel(t);
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
    for (int t = 0; t < nt; ++t) {
        auto ids = local_basis_ids(kp, b, t);
        for (int a = 0; a < kLocalFields; ++a)
            v[ids[a]] += local[t][a];
    }
    return v;
}

Eigen::MatrixXd basis_integrals(const SimplicialComplex3& kp, const BasisIndex& b)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(b.size(), 3);
    for (int t = 0; t < kp.num_tets(); ++t) {
        TetGeometry g = tet_geometry(kp, t);
        auto fields = local_fields(g);
        auto ids = local_basis_ids(kp, b, t);
        for (int a = 0; a < kLocalFields; ++a)
            out.row(ids[a]) += (fields[a].v.rowwise().sum() * (g.volume / 4.0)).transpose();
    }
    return out;
}

Eigen::MatrixXd constant_field_coefficients(const SimplicialComplex3& kp, const BasisIndex& b)
{
    Eigen::MatrixXd n = Eigen::MatrixXd::Zero(b.size(), 3);
    for (int e = 0; e < kp.num_edges(); ++e)
        n.row(b.edge_id(e)) = (kp.vertex(kp.edge(e)[1]) - kp.vertex(kp.edge(e)[0])).transpose();
    for (int f = 0; f < kp.num_faces(); ++f) {
        const auto& v = kp.face(f);
        Vec3 area = 0.5 * (kp.vertex(v[1]) - kp.vertex(v[0])).cross(kp.vertex(v[2]) - kp.vertex(v[0]));
        n.row(b.face_id(f)) = -area.transpose();
    }
    return n;
}

Eigen::VectorXd position_coefficients(const SimplicialComplex3& kp, const BasisIndex& b)
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(b.size());
    for (int f = 0; f < kp.num_faces(); ++f) {
        const auto& v = kp.face(f);
        const Vec3 p0 = kp.vertex(v[0]), p1 = kp.vertex(v[1]), p2 = kp.vertex(v[2]);
        Vec3 area = 0.5 * (p1 - p0).cross(p2 - p0);
        c[b.face_id(f)] = ((p0 + p1 + p2) / 3.0).dot(area);
    }
    return c;
}

double sparsity_score(const SparseMatrix& m)
{
    double total = static_cast<double>(m.rows()) * static_cast<double>(m.cols());
    return 1.0 - static_cast<double>(m.nonZeros()) / total;
}

double relative_asymmetry(const SparseMatrix& m)
{
    SparseMatrix d = m - SparseMatrix(m.transpose());
    double scale = 0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            scale = std::max(scale, std::abs(it.value()));
    double worst = 0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(d, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    return scale > 0 ? worst / scale : 0.0;
}

}  // namespace plates
