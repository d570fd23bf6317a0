#pragma once

// Stratified Monte Carlo evaluation of the quadratic forms of I, K and the
// first-iterate operator A.  Fields, gradients and tensor contractions are
// rebuilt here from barycentric coordinates and the Voigt matrix; only the
// mesh connectivity is taken from the library.

#include "plates/material.hpp"
#include "plates/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using plates::Vec3;
using Bary = Eigen::Vector4d;

inline int voigt(int i, int j)
{
    if (i == j)
        return i;
    if (i > j)
        std::swap(i, j);
    return i == 1 ? 3 : (j == 2 ? 4 : 5);
}

inline double tensor(const plates::ElasticTensor& w, int i, int j, int k, int l)
{
    return w.voigt()(voigt(i, j), voigt(k, l));
}

// sigma_ai = C_aibj d_j u^b, g(b, j) = d_j u^b
inline Eigen::Matrix3d stress(const plates::ElasticTensor& w, const Eigen::Matrix3d& g)
{
    Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i)
            for (int b = 0; b < 3; ++b)
                for (int j = 0; j < 3; ++j)
                    s(a, i) += tensor(w, a, i, b, j) * g(b, j);
    return s;
}

inline double contract(const plates::ElasticTensor& w, const Eigen::Matrix3d& ga, const Eigen::Matrix3d& gb)
{
    return ga.cwiseProduct(stress(w, gb)).sum();
}

// sum_j C_iijj N_i
inline Vec3 boundary_stress(const plates::ElasticTensor& w, const Vec3& n)
{
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        double s = 0;
        for (int j = 0; j < 3; ++j)
            s += tensor(w, i, i, j, j);
        out[i] = s * n[i];
    }
    return out;
}

// The ten Whitney fields of one tet: 6 edges (i < j local), then the faces
// opposite local vertices 0..3.
struct TetBasis {
    std::array<Vec3, 4> x;
    std::array<Vec3, 4> g;
    double volume = 0;
    std::array<int, 10> ids{};

    TetBasis(const plates::SimplicialComplex3& k, int t)
    {
        const auto& v = k.tet(t);
        Eigen::Matrix4d m;
        for (int i = 0; i < 4; ++i) {
            x[i] = k.vertex(v[i]);
            m.col(i) << 1.0, x[i];
        }
        const Eigen::Matrix4d inv = m.inverse();
        for (int i = 0; i < 4; ++i)
            g[i] = inv.row(i).tail<3>().transpose();
        volume = std::abs(m.determinant()) / 6.0;
        int q = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                ids[q++] = k.find_edge(v[i], v[j]);
        for (int o = 0; o < 4; ++o) {
            std::array<int, 3> f{};
            int r = 0;
            for (int i = 0; i < 4; ++i)
                if (i != o)
                    f[r++] = v[i];
            ids[6 + o] = k.num_edges() + k.find_face(f[0], f[1], f[2]);
        }
    }

    Vec3 point(const Bary& l) const { return l[0] * x[0] + l[1] * x[1] + l[2] * x[2] + l[3] * x[3]; }

    void fields(const Bary& l, std::array<Vec3, 10>& val, std::array<Eigen::Matrix3d, 10>& jac) const
    {
        int q = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                val[q] = l[i] * g[j] - l[j] * g[i];
                jac[q] = g[j] * g[i].transpose() - g[i] * g[j].transpose();
                ++q;
            }
        for (int o = 0; o < 4; ++o) {
            std::array<int, 3> f{};
            int r = 0;
            for (int i = 0; i < 4; ++i)
                if (i != o)
                    f[r++] = i;
            const int a = f[0], b = f[1], c = f[2];
            const Vec3 bc = g[b].cross(g[c]), ca = g[c].cross(g[a]), ab = g[a].cross(g[b]);
            val[6 + o] = 2.0 * (l[a] * bc + l[b] * ca + l[c] * ab);
            jac[6 + o] = 2.0 * (bc * g[a].transpose() + ca * g[b].transpose() + ab * g[c].transpose());
        }
    }
};

// strata of the reference tet and triangle in barycentric coordinates
inline std::vector<std::array<Bary, 4>> tet_strata(int depth)
{
    std::vector<std::array<Bary, 4>> cur = {{Bary::Unit(0), Bary::Unit(1), Bary::Unit(2), Bary::Unit(3)}};
    for (int d = 0; d < depth; ++d) {
        std::vector<std::array<Bary, 4>> next;
        for (const auto& t : cur) {
            auto m = [&](int i, int j) -> Bary { return 0.5 * (t[i] + t[j]); };
            next.push_back({t[0], m(0, 1), m(0, 2), m(0, 3)});
            next.push_back({m(0, 1), t[1], m(1, 2), m(1, 3)});
            next.push_back({m(0, 2), m(1, 2), t[2], m(2, 3)});
            next.push_back({m(0, 3), m(1, 3), m(2, 3), t[3]});
            next.push_back({m(0, 1), m(0, 2), m(0, 3), m(1, 3)});
            next.push_back({m(0, 1), m(0, 2), m(1, 2), m(1, 3)});
            next.push_back({m(0, 2), m(0, 3), m(1, 3), m(2, 3)});
            next.push_back({m(0, 2), m(1, 2), m(1, 3), m(2, 3)});
        }
        cur.swap(next);
    }
    return cur;
}

inline double tet_fraction(const std::array<Bary, 4>& s)
{
    Eigen::Matrix3d m;
    for (int k = 1; k < 4; ++k)
        m.row(k - 1) = (s[k] - s[0]).tail<3>().transpose();
    return std::abs(m.determinant());
}

using Tri = std::array<Eigen::Vector3d, 3>;

inline std::vector<Tri> tri_strata(int depth)
{
    std::vector<Tri> cur = {{Eigen::Vector3d::Unit(0), Eigen::Vector3d::Unit(1), Eigen::Vector3d::Unit(2)}};
    for (int d = 0; d < depth; ++d) {
        std::vector<Tri> next;
        for (const auto& t : cur) {
            const Eigen::Vector3d a = 0.5 * (t[0] + t[1]), b = 0.5 * (t[1] + t[2]), c = 0.5 * (t[0] + t[2]);
            next.push_back({t[0], a, c});
            next.push_back({a, t[1], b});
            next.push_back({c, b, t[2]});
            next.push_back({a, b, c});
        }
        cur.swap(next);
    }
    return cur;
}

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    Eigen::Vector4d simplex4()
    {
        Eigen::Vector4d e;
        for (int i = 0; i < 4; ++i)
            e[i] = exp_(rng_);
        return e / e.sum();
    }

    Eigen::Vector3d simplex3()
    {
        Eigen::Vector3d e;
        for (int i = 0; i < 3; ++i)
            e[i] = exp_(rng_);
        return e / e.sum();
    }

private:
    std::mt19937_64 rng_;
    std::exponential_distribution<double> exp_{1.0};
};

enum class Form { Gram, Stiffness, Iterate };

struct Options {
    long samples = 1000000;
    std::uint64_t seed = 2024;
    double lambda = 1.0;
};

namespace detail {

enum Cls { EdgeIn, EdgeBd, FaceIn, FaceBd };

inline double volume_part(const plates::ElasticTensor& w, const Eigen::Vector3d& l, double lambda,
                          const Eigen::Matrix3d& j)
{
    const double div = j.trace();
    const double wdiv = l[0] * j(0, 0) + l[1] * j(1, 1) + l[2] * j(2, 2);
    return -contract(w, j, j) - lambda * div * div + wdiv * div;
}

// A entry of a pair of fields on a boundary face; dab = div(b)(a.N),
// sab = (sigma(grad b)N).a, qs = Q(a,b) + Q(b,a)
inline double iterate_pair(Cls ca, Cls cb, double qs, double dab, double dba, double sab, double sba)
{
    const bool ea = ca <= EdgeBd, eb = cb <= EdgeBd;
    if (ea && eb)
        return ca == EdgeBd && cb == EdgeBd ? -0.5 * qs : 0.0;
    if (!ea && !eb)
        return ca == FaceBd && cb == FaceBd ? 0.5 * (sab + sba) + 0.5 * (dab + dba) - 0.5 * qs : 0.0;
    if (!ea)
        return iterate_pair(cb, ca, qs, dba, dab, sba, sab);
    if (ca == EdgeIn)
        return cb == FaceBd ? 0.5 * (dab - qs) : 0.0;
    return 0.5 * sab + 0.5 * dab - 0.5 * qs;
}

}  // namespace detail

// <M c, c> for M = I, K or A on the coarse basis of k
inline double quadratic_form(const plates::SimplicialComplex3& k, const plates::ElasticTensor& w,
                             const Eigen::VectorXd& c, Form form, const Options& opt)
{
    Sampler smp(opt.seed);
    const Eigen::Vector3d l = w.l_constants();
    const double lambda = form == Form::Iterate ? 1.0 : opt.lambda;
    std::array<Vec3, 10> val;
    std::array<Eigen::Matrix3d, 10> jac;

    const long nt = k.num_tets();
    int depth = 0;
    while (nt * (1L << (3 * (depth + 1))) * 2 <= opt.samples)
        ++depth;
    const auto strata = tet_strata(depth);
    const long per = std::max(1L, opt.samples / (nt * static_cast<long>(strata.size())));
    double total = 0;
    for (int t = 0; t < nt; ++t) {
        const TetBasis tb(k, t);
        double acc = 0;
        for (const auto& s : strata) {
            double sub = 0;
            for (long r = 0; r < per; ++r) {
                const Eigen::Vector4d mu = smp.simplex4();
                const Bary lam = mu[0] * s[0] + mu[1] * s[1] + mu[2] * s[2] + mu[3] * s[3];
                tb.fields(lam, val, jac);
                if (form == Form::Gram) {
                    Vec3 u = Vec3::Zero();
                    for (int a = 0; a < 10; ++a)
                        u += c[tb.ids[a]] * val[a];
                    sub += u.squaredNorm();
                } else {
                    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
                    for (int a = 6; a < 10; ++a)
                        j += c[tb.ids[a]] * jac[a];
                    sub += detail::volume_part(w, l, lambda, j);
                }
            }
            acc += tet_fraction(s) * sub / static_cast<double>(per);
        }
        total += tb.volume * acc;
    }
    if (form == Form::Gram)
        return total;

    std::vector<int> bfaces;
    for (int f = 0; f < k.num_faces(); ++f)
        if (k.face_tets(f)[1] < 0)
            bfaces.push_back(f);
    const long nb = static_cast<long>(bfaces.size());
    int tdepth = 0;
    while (nb * (1L << (2 * (tdepth + 1))) * 2 <= opt.samples)
        ++tdepth;
    const auto tri = tri_strata(tdepth);
    const long tper = std::max(1L, opt.samples / (nb * static_cast<long>(tri.size())));
    const double tri_fraction = std::pow(0.25, tdepth);

    for (int f : bfaces) {
        const int t = k.face_tets(f)[0];
        const TetBasis tb(k, t);
        const auto& fv = k.face(f);
        int opp = -1;
        for (int i = 0; i < 4; ++i)
            if (std::find(fv.begin(), fv.end(), k.tet(t)[i]) == fv.end())
                opp = i;
        std::array<int, 3> on{};
        int r = 0;
        for (int i = 0; i < 4; ++i)
            if (i != opp)
                on[r++] = i;
        Vec3 n = (tb.x[on[1]] - tb.x[on[0]]).cross(tb.x[on[2]] - tb.x[on[0]]);
        const double area = 0.5 * n.norm();
        n.normalize();
        if (n.dot(tb.x[on[0]] - tb.x[opp]) < 0)
            n = -n;
        const Vec3 wn = boundary_stress(w, n);
        const double wnn = wn.dot(n);

        std::array<detail::Cls, 10> cls{};
        for (int a = 0; a < 10; ++a) {
            const int id = tb.ids[a];
            if (id < k.num_edges())
                cls[a] = k.edge_on_boundary(id) ? detail::EdgeBd : detail::EdgeIn;
            else
                cls[a] = k.face_on_boundary(id - k.num_edges()) ? detail::FaceBd : detail::FaceIn;
        }
        std::array<bool, 6> on_face{};
        int q = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                on_face[q++] = i != opp && j != opp;
        const int self = 6 + opp;

        double acc = 0;
        for (const auto& s : tri) {
            double sub = 0;
            for (long rr = 0; rr < tper; ++rr) {
                const Eigen::Vector3d mu = smp.simplex3();
                const Eigen::Vector3d b3 = mu[0] * s[0] + mu[1] * s[1] + mu[2] * s[2];
                Bary lam = Bary::Zero();
                for (int z = 0; z < 3; ++z)
                    lam[on[z]] = b3[z];
                tb.fields(lam, val, jac);
                if (form == Form::Stiffness) {
                    // the face against itself and against its three edges
                    const Eigen::Matrix3d& jf = jac[self];
                    const Vec3 tr = stress(w, jf) * n;
                    const double nd_f = n.dot(jf * n);
                    auto term = [&](int a, bool cross) {
                        const double an = val[a].dot(n);
                        double v = tr.dot(val[a]) - n.dot(tr) * an - wnn * nd_f * an;
                        if (cross)
                            v -= wnn * n.dot(jac[a] * n) * val[self].dot(n);
                        return v;
                    };
                    const double cf = c[tb.ids[self]];
                    sub += cf * cf * term(self, false);
                    for (int a = 0; a < 6; ++a)
                        if (on_face[a])
                            sub += c[tb.ids[a]] * cf * term(a, true);
                } else {
                    std::array<double, 10> qw{}, qn{}, dv{};
                    std::array<Vec3, 10> st;
                    for (int a = 0; a < 10; ++a) {
                        qw[a] = wn.dot(val[a]);
                        qn[a] = n.dot(val[a]);
                        dv[a] = jac[a].trace();
                        st[a] = stress(w, jac[a]) * n;
                    }
                    for (int a = 0; a < 10; ++a)
                        for (int b = 0; b < 10; ++b) {
                            const double ca = c[tb.ids[a]], cb = c[tb.ids[b]];
                            if (ca == 0.0 || cb == 0.0)
                                continue;
                            const double qs = qw[a] * qn[b] + qw[b] * qn[a];
                            sub += ca * cb *
                                   detail::iterate_pair(cls[a], cls[b], qs, dv[b] * qn[a], dv[a] * qn[b],
                                                        st[b].dot(val[a]), st[a].dot(val[b]));
                        }
                }
            }
            acc += tri_fraction * sub / static_cast<double>(tper);
        }
        total += area * acc;
    }
    return total;
}

}  // namespace oracle
