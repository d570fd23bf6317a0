#include "plates/whitney.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace plates {

TetGeometry tet_geometry(const SimplicialComplex3& k, int t)
{
    TetGeometry g;
    const auto& v = k.tet(t);
    for (int i = 0; i < 4; ++i)
        g.x[i] = k.vertex(v[i]);
    Eigen::Matrix3d m;
    m.col(0) = g.x[1] - g.x[0];
    m.col(1) = g.x[2] - g.x[0];
    m.col(2) = g.x[3] - g.x[0];
    // rows of m^{-1} are the gradients of lambda_1..lambda_3
    Eigen::Matrix3d inv = m.inverse();
    for (int i = 0; i < 3; ++i)
        g.grad[i + 1] = inv.row(i).transpose();
    g.grad[0] = -(g.grad[1] + g.grad[2] + g.grad[3]);
    g.volume = std::abs(m.determinant()) / 6.0;
    return g;
}

Eigen::Vector4d barycentric_coords(const TetGeometry& g, const Vec3& p)
{
    Eigen::Vector4d l;
    for (int i = 1; i < 4; ++i)
        l[i] = g.grad[i].dot(p - g.x[0]);
    l[0] = 1.0 - l[1] - l[2] - l[3];
    return l;
}

Eigen::Matrix3d AffineField::jacobian(const TetGeometry& g) const
{
    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
    for (int k = 0; k < 4; ++k)
        j += v.col(k) * g.grad[k].transpose();
    return j;
}

AffineField edge_field(const TetGeometry& g, int local_edge)
{
    AffineField f;
    int a = kTetEdge[local_edge][0], b = kTetEdge[local_edge][1];
    f.v.col(a) = g.grad[b];
    f.v.col(b) = -g.grad[a];
    return f;
}

AffineField face_field(const TetGeometry& g, int opposite_vertex)
{
    int idx[3], n = 0;
    for (int i = 0; i < 4; ++i)
        if (i != opposite_vertex)
            idx[n++] = i;
    const Vec3 &ga = g.grad[idx[0]], &gb = g.grad[idx[1]], &gc = g.grad[idx[2]];
    AffineField f;
    f.v.col(idx[0]) = 2.0 * gb.cross(gc);
    f.v.col(idx[1]) = 2.0 * gc.cross(ga);
    f.v.col(idx[2]) = 2.0 * ga.cross(gb);
    return f;
}

bool is_scalar(FieldKind k)
{
    return k == FieldKind::Vertex || k == FieldKind::Tet;
}

std::vector<int> support_tets(const SimplicialComplex3& k, const WhitneyField& w)
{
    std::vector<int> out;
    switch (w.kind) {
    case FieldKind::Tet:
        out.push_back(w.owner);
        break;
    case FieldKind::Face:
        for (int t : k.face_tets(w.owner))
            if (t >= 0)
                out.push_back(t);
        break;
    case FieldKind::Edge:
        for (int t = 0; t < k.num_tets(); ++t)
            for (int e : k.tet_edges(t))
                if (e == w.owner)
                    out.push_back(t);
        break;
    case FieldKind::Vertex:
        for (int t = 0; t < k.num_tets(); ++t)
            for (int p : k.tet(t))
                if (p == w.owner)
                    out.push_back(t);
        break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool restrict_to_tet(const SimplicialComplex3& k, const WhitneyField& w, int t, const TetGeometry& g,
                     AffineField& out)
{
    out = AffineField{};
    switch (w.kind) {
    case FieldKind::Tet:
        if (w.owner != t)
            return false;
        // (1/6) W_t is the indicator of t
        out.v.row(0).setConstant(6.0);
        return true;
    case FieldKind::Vertex:
        for (int i = 0; i < 4; ++i)
            if (k.tet(t)[i] == w.owner) {
                out.v(0, i) = 1.0;
                return true;
            }
        return false;
    case FieldKind::Edge:
        for (int l = 0; l < 6; ++l)
            if (k.tet_edges(t)[l] == w.owner) {
                out = edge_field(g, l);
                return true;
            }
        return false;
    case FieldKind::Face:
        for (int i = 0; i < 4; ++i)
            if (k.tet_faces(t)[i] == w.owner) {
                out = face_field(g, i);
                return true;
            }
        return false;
    }
    return false;
}

PointLocator::PointLocator(const SimplicialComplex3& k) : k_(k)
{
    lo_ = hi_ = k.vertex(0);
    for (const auto& p : k.vertices()) {
        lo_ = lo_.cwiseMin(p);
        hi_ = hi_.cwiseMax(p);
    }
    Vec3 span = hi_ - lo_;
    double target = std::max(1.0, std::cbrt(static_cast<double>(k.num_tets())));
    double h = std::max(span.maxCoeff() / target, 1e-300);
    for (int a = 0; a < 3; ++a)
        n_[a] = std::max(1, std::min(256, static_cast<int>(std::ceil(span[a] / h))));
    cells_.assign(static_cast<std::size_t>(n_[0]) * n_[1] * n_[2], {});
    for (int t = 0; t < k.num_tets(); ++t) {
        Vec3 a = k.vertex(k.tet(t)[0]), b = a;
        for (int p : k.tet(t)) {
            a = a.cwiseMin(k.vertex(p));
            b = b.cwiseMax(k.vertex(p));
        }
        int i0 = cell_of(a, 0), i1 = cell_of(b, 0);
        int j0 = cell_of(a, 1), j1 = cell_of(b, 1);
        int l0 = cell_of(a, 2), l1 = cell_of(b, 2);
        for (int l = l0; l <= l1; ++l)
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i)
                    cells_[i + n_[0] * (j + n_[1] * l)].push_back(t);
    }
}

int PointLocator::cell_of(const Vec3& p, int axis) const
{
    double span = hi_[axis] - lo_[axis];
    if (span <= 0)
        return 0;
    int c = static_cast<int>(std::floor((p[axis] - lo_[axis]) / span * n_[axis]));
    return std::clamp(c, 0, n_[axis] - 1);
}

int PointLocator::locate(const Vec3& p, Eigen::Vector4d* lambda) const
{
    Vec3 span = hi_ - lo_;
    const double slack = 1e-12 * span.maxCoeff();
    for (int a = 0; a < 3; ++a)
        if (p[a] < lo_[a] - slack || p[a] > hi_[a] + slack)
            throw DomainError("point outside the polytope");
    const auto& cell = cells_[cell_of(p, 0) + n_[0] * (cell_of(p, 1) + n_[1] * cell_of(p, 2))];
    for (int t : cell) {
        TetGeometry g = tet_geometry(k_, t);
        Eigen::Vector4d l = barycentric_coords(g, p);
        if (l.minCoeff() >= -1e-12) {
            if (lambda)
                *lambda = l;
            return t;
        }
    }
    throw DomainError("point outside the polytope");
}

double eval_scalar(const SimplicialComplex3& k, const PointLocator& loc, const WhitneyField& w, const Vec3& p)
{
    if (!is_scalar(w.kind))
        throw std::invalid_argument("eval_scalar on a vector field");
    Eigen::Vector4d l;
    int t = loc.locate(p, &l);
    TetGeometry g = tet_geometry(k, t);
    AffineField f;
    if (!restrict_to_tet(k, w, t, g, f))
        return 0.0;
    return f.value(l)[0];
}

Vec3 eval_vector(const SimplicialComplex3& k, const PointLocator& loc, const WhitneyField& w, const Vec3& p)
{
    if (is_scalar(w.kind))
        throw std::invalid_argument("eval_vector on a scalar field");
    Eigen::Vector4d l;
    int t = loc.locate(p, &l);
    TetGeometry g = tet_geometry(k, t);
    AffineField f;
    if (!restrict_to_tet(k, w, t, g, f))
        return Vec3::Zero();
    return f.value(l);
}

namespace {

std::vector<int> union_support(const SimplicialComplex3& k, const FieldCombination& a)
{
    std::vector<int> out;
    for (const auto& [w, c] : a) {
        auto s = support_tets(k, w);
        out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

AffineField combine(const SimplicialComplex3& k, const FieldCombination& a, int t, const TetGeometry& g)
{
    AffineField sum, f;
    for (const auto& [w, c] : a)
        if (restrict_to_tet(k, w, t, g, f))
            sum.add(f, c);
    return sum;
}

// int lambda_k lambda_l over a tet of volume v
double tet_mass(int k, int l, double v)
{
    return (k == l ? 2.0 : 1.0) * v / 20.0;
}

}  // namespace

double integrate_pairing(const SimplicialComplex3& k, const FieldCombination& a, const FieldCombination& b,
                         Pairing kind, const ElasticTensor* w)
{
    if ((kind == Pairing::GradGrad || kind == Pairing::WeightedDiv) && !w)
        throw std::invalid_argument("pairing needs an elastic tensor");
    std::vector<int> sa = union_support(k, a), sb = union_support(k, b), common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    Eigen::Vector3d l = w ? w->l_constants() : Eigen::Vector3d::Zero();
    double total = 0;
    for (int t : common) {
        TetGeometry g = tet_geometry(k, t);
        AffineField fa = combine(k, a, t, g), fb = combine(k, b, t, g);
        switch (kind) {
        case Pairing::Dot: {
            double s = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    s += fa.v.col(i).dot(fb.v.col(j)) * tet_mass(i, j, g.volume);
            total += s;
            break;
        }
        case Pairing::GradGrad:
            total += g.volume * w->contract(fa.jacobian(g), fb.jacobian(g));
            break;
        case Pairing::DivDiv:
            total += g.volume * fa.divergence(g) * fb.divergence(g);
            break;
        case Pairing::WeightedDiv: {
            Eigen::Matrix3d ja = fa.jacobian(g);
            total += g.volume * (l[0] * ja(0, 0) + l[1] * ja(1, 1) + l[2] * ja(2, 2)) * fb.divergence(g);
            break;
        }
        }
    }
    return total;
}

BoundaryFace boundary_face(const SimplicialComplex3& k, int f)
{
    if (!k.face_on_boundary(f))
        throw DomainError("face " + std::to_string(f) + " is not on the boundary");
    BoundaryFace bf;
    bf.face = f;
    bf.tet = k.face_tets(f)[0];
    for (int i = 0; i < 4; ++i)
        if (k.tet_faces(bf.tet)[i] == f)
            bf.opposite = i;
    bf.area = k.face_area(f);
    bf.normal = k.exterior_normal(f);
    return bf;
}

Vec3 face_integral(const AffineField& a, const BoundaryFace& bf)
{
    Vec3 s = Vec3::Zero();
    for (int i = 0; i < 4; ++i)
        if (i != bf.opposite)
            s += a.v.col(i);
    return s * (bf.area / 3.0);
}

double face_pairing(const AffineField& a, const AffineField& b, const TetGeometry& g, const BoundaryFace& bf,
                    BoundaryPairing kind, const ElasticTensor* w)
{
    const Vec3& n = bf.normal;
    // face-constant factors multiply an affine integrand
    auto linear = [&](const Vec3& c) { return c.dot(face_integral(a, bf)); };
    switch (kind) {
    case BoundaryPairing::TractionDot:
    case BoundaryPairing::TractionNormal:
        if (!w)
            throw std::invalid_argument("traction pairing needs an elastic tensor");
        {
            Vec3 s = w->traction(b.jacobian(g), n);
            return kind == BoundaryPairing::TractionDot ? linear(s) : n.dot(s) * linear(n);
        }
    case BoundaryPairing::NormalDerivNormal:
        return n.dot(b.jacobian(g) * n) * linear(n);
    case BoundaryPairing::DivNormal:
        return b.divergence(g) * linear(n);
    default:
        break;
    }
    Vec3 wn = Vec3::Zero();
    if (kind == BoundaryPairing::BoundaryStress) {
        if (!w)
            throw std::invalid_argument("boundary stress pairing needs an elastic tensor");
        wn = w->boundary_contraction(n);
    }
    double s = 0;
    for (int i = 0; i < 4; ++i) {
        if (i == bf.opposite)
            continue;
        for (int j = 0; j < 4; ++j) {
            if (j == bf.opposite)
                continue;
            double m = (i == j ? 2.0 : 1.0) * bf.area / 12.0;
            const auto ai = a.v.col(i);
            const auto bj = b.v.col(j);
            double phi = 0;
            switch (kind) {
            case BoundaryPairing::Dot: phi = ai.dot(bj); break;
            case BoundaryPairing::NormalNormal: phi = ai.dot(n) * bj.dot(n); break;
            case BoundaryPairing::BoundaryStress: phi = wn.dot(ai) * n.dot(bj); break;
            default: break;
            }
            s += phi * m;
        }
    }
    return s;
}

double boundary_pairing(const SimplicialComplex3& k, const FieldCombination& a, const FieldCombination& b,
                        BoundaryPairing kind, int face, const ElasticTensor* w)
{
    BoundaryFace bf = boundary_face(k, face);
    TetGeometry g = tet_geometry(k, bf.tet);
    AffineField fa = combine(k, a, bf.tet, g), fb = combine(k, b, bf.tet, g);
    return face_pairing(fa, fb, g, bf, kind, w);
}

ChainOperators chain_operators(const SimplicialComplex3& k)
{
    using T = Eigen::Triplet<double>;
    std::vector<T> tg, tc, td;
    for (int e = 0; e < k.num_edges(); ++e) {
        tg.emplace_back(e, k.edge(e)[0], -1.0);
        tg.emplace_back(e, k.edge(e)[1], 1.0);
    }
    for (int f = 0; f < k.num_faces(); ++f)
        for (int i = 0; i < 3; ++i)
            tc.emplace_back(f, k.face_edges(f)[i], (i % 2 == 0) ? 1.0 : -1.0);
    for (int t = 0; t < k.num_tets(); ++t)
        for (int i = 0; i < 4; ++i)
            td.emplace_back(t, k.tet_faces(t)[i], k.tet_sign(t) * ((i % 2 == 0) ? 1.0 : -1.0));
    ChainOperators ops;
    ops.grad.resize(k.num_edges(), k.num_vertices());
    ops.curl.resize(k.num_faces(), k.num_edges());
    ops.div.resize(k.num_tets(), k.num_faces());
    ops.grad.setFromTriplets(tg.begin(), tg.end());
    ops.curl.setFromTriplets(tc.begin(), tc.end());
    ops.div.setFromTriplets(td.begin(), td.end());
    return ops;
}

Eigen::VectorXd apply_chain(const ChainOperators& ops, ChainOp op, const Eigen::VectorXd& c)
{
    const Eigen::SparseMatrix<double>& m = op == ChainOp::Grad ? ops.grad : op == ChainOp::Curl ? ops.curl : ops.div;
    if (c.size() != m.cols())
        throw std::invalid_argument("coefficient vector has dimension " + std::to_string(c.size()) + ", expected " +
                                    std::to_string(m.cols()));
    return m * c;
}

}  // namespace plates
