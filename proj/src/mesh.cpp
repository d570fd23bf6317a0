#include "plates/mesh.hpp"
#include "plates/hash.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace plates {

namespace {

template <std::size_t N>
struct Keyed {
    std::array<int, N> key;
    int owner;
    int local;
};

template <std::size_t N>
bool key_less(const Keyed<N>& a, const Keyed<N>& b)
{
    if (a.key != b.key)
        return a.key < b.key;
    return a.owner < b.owner;
}

}  // namespace

SimplicialComplex3 SimplicialComplex3::from_tets(std::vector<Vec3> vertices,
                                                 std::vector<std::array<int, 4>> tets)
{
    SimplicialComplex3 k;
    k.verts_ = std::move(vertices);
    k.tets_ = std::move(tets);
    k.build();
    return k;
}

void SimplicialComplex3::build()
{
    const int nv = num_vertices();
    const int nt = num_tets();
    if (nt == 0)
        throw MeshError("complex has no tetrahedra");

    tet_sign_.assign(nt, 0);
    tet_vol_.assign(nt, 0.0);
    std::vector<char> used(nv, 0);
    for (int t = 0; t < nt; ++t) {
        auto& tv = tets_[t];
        for (int v : tv) {
            if (v < 0 || v >= nv)
                throw MeshError("tet " + std::to_string(t) + " references missing vertex " + std::to_string(v));
            used[v] = 1;
        }
        std::sort(tv.begin(), tv.end());
        if (std::adjacent_find(tv.begin(), tv.end()) != tv.end())
            throw MeshError("tet " + std::to_string(t) + " repeats a vertex");
        Eigen::Matrix3d m;
        m.col(0) = verts_[tv[1]] - verts_[tv[0]];
        m.col(1) = verts_[tv[2]] - verts_[tv[0]];
        m.col(2) = verts_[tv[3]] - verts_[tv[0]];
        double det = m.determinant();
        double scale = m.colwise().norm().prod();
        if (!(std::abs(det) > 1e-12 * scale))
            throw MeshError("tet " + std::to_string(t) + " is degenerate");
        tet_sign_[t] = det > 0 ? 1 : -1;
        tet_vol_[t] = std::abs(det) / 6.0;
    }
    for (int p = 0; p < nv; ++p)
        if (!used[p])
            throw MeshError("vertex " + std::to_string(p) + " is not used by any tet");

    // faces, keyed by sorted triple
    std::vector<Keyed<3>> fk;
    fk.reserve(4 * static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        const auto& v = tets_[t];
        fk.push_back({{v[1], v[2], v[3]}, t, 0});
        fk.push_back({{v[0], v[2], v[3]}, t, 1});
        fk.push_back({{v[0], v[1], v[3]}, t, 2});
        fk.push_back({{v[0], v[1], v[2]}, t, 3});
    }
    std::sort(fk.begin(), fk.end(), key_less<3>);
    faces_.clear();
    face_tets_.clear();
    tet_faces_.assign(nt, {});
    for (std::size_t i = 0; i < fk.size(); ++i) {
        if (i == 0 || fk[i].key != fk[i - 1].key) {
            faces_.push_back(fk[i].key);
            face_tets_.push_back({fk[i].owner, -1});
        } else {
            auto& ft = face_tets_.back();
            if (ft[1] != -1)
                throw MeshError("face (" + std::to_string(fk[i].key[0]) + ", " + std::to_string(fk[i].key[1]) +
                                ", " + std::to_string(fk[i].key[2]) + ") bounds more than two tets");
            ft[1] = fk[i].owner;
        }
        tet_faces_[fk[i].owner][fk[i].local] = num_faces() - 1;
    }

    std::vector<Keyed<2>> ek;
    ek.reserve(6 * static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
        for (int l = 0; l < 6; ++l)
            ek.push_back({{tets_[t][kTetEdge[l][0]], tets_[t][kTetEdge[l][1]]}, t, l});
    std::sort(ek.begin(), ek.end(), key_less<2>);
    edges_.clear();
    edge_tet_.clear();
    tet_edges_.assign(nt, {});
    for (std::size_t i = 0; i < ek.size(); ++i) {
        if (i == 0 || ek[i].key != ek[i - 1].key) {
            edges_.push_back(ek[i].key);
            edge_tet_.push_back(ek[i].owner);
        }
        tet_edges_[ek[i].owner][ek[i].local] = num_edges() - 1;
    }

    face_edges_.resize(faces_.size());
    for (int f = 0; f < num_faces(); ++f) {
        const auto& v = faces_[f];
        face_edges_[f] = {find_edge(v[1], v[2]), find_edge(v[0], v[2]), find_edge(v[0], v[1])};
    }

    vertex_tet_.assign(nv, -1);
    for (int t = nt - 1; t >= 0; --t)
        for (int v : tets_[t])
            vertex_tet_[v] = t;

    bv_.assign(nv, 0);
    be_.assign(num_edges(), 0);
    bf_.assign(num_faces(), 0);
    std::vector<int> boundary_faces_per_edge(num_edges(), 0);
    for (int f = 0; f < num_faces(); ++f) {
        if (face_tets_[f][1] != -1)
            continue;
        bf_[f] = 1;
        for (int v : faces_[f])
            bv_[v] = 1;
        for (int e : face_edges_[f]) {
            be_[e] = 1;
            ++boundary_faces_per_edge[e];
        }
    }
    for (int e = 0; e < num_edges(); ++e)
        if (be_[e] && boundary_faces_per_edge[e] != 2)
            throw MeshError("boundary is not a closed surface at edge (" + std::to_string(edges_[e][0]) + ", " +
                            std::to_string(edges_[e][1]) + ")");
    nbv_ = static_cast<int>(std::count(bv_.begin(), bv_.end(), 1));
    nbe_ = static_cast<int>(std::count(be_.begin(), be_.end(), 1));
    nbf_ = static_cast<int>(std::count(bf_.begin(), bf_.end(), 1));
}

int SimplicialComplex3::count(int dim) const
{
    switch (dim) {
    case 0: return num_vertices();
    case 1: return num_edges();
    case 2: return num_faces();
    case 3: return num_tets();
    }
    throw std::out_of_range("simplex dimension must be 0..3");
}

double SimplicialComplex3::total_volume() const
{
    // compensated sum, the subdivided slab has tens of thousands of terms
    double v = 0, c = 0;
    for (double x : tet_vol_) {
        const double t = v + x;
        c += std::abs(v) >= std::abs(x) ? (v - t) + x : (x - t) + v;
        v = t;
    }
    return v + c;
}

int SimplicialComplex3::b_pe(int p, int e) const
{
    if (edges_[e][1] == p)
        return 1;
    if (edges_[e][0] == p)
        return -1;
    return 0;
}

int SimplicialComplex3::b_ef(int e, int f) const
{
    for (int i = 0; i < 3; ++i)
        if (face_edges_[f][i] == e)
            return (i % 2 == 0) ? 1 : -1;
    return 0;
}

int SimplicialComplex3::b_ft(int f, int t) const
{
    for (int i = 0; i < 4; ++i)
        if (tet_faces_[t][i] == f)
            return tet_sign_[t] * ((i % 2 == 0) ? 1 : -1);
    return 0;
}

std::vector<int> SimplicialComplex3::boundary_faces() const
{
    std::vector<int> out;
    out.reserve(nbf_);
    for (int f = 0; f < num_faces(); ++f)
        if (bf_[f])
            out.push_back(f);
    return out;
}

int SimplicialComplex3::find_edge(int a, int b) const
{
    std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key)
        return -1;
    return static_cast<int>(it - edges_.begin());
}

int SimplicialComplex3::find_face(int a, int b, int c) const
{
    std::array<int, 3> key{a, b, c};
    std::sort(key.begin(), key.end());
    auto it = std::lower_bound(faces_.begin(), faces_.end(), key);
    if (it == faces_.end() || *it != key)
        return -1;
    return static_cast<int>(it - faces_.begin());
}

Vec3 SimplicialComplex3::exterior_normal(int f) const
{
    if (!bf_[f])
        throw MeshError("face " + std::to_string(f) + " is not a boundary face");
    const auto& v = faces_[f];
    Vec3 n = (verts_[v[1]] - verts_[v[0]]).cross(verts_[v[2]] - verts_[v[0]]);
    int t = face_tets_[f][0];
    int opp = -1;
    for (int w : tets_[t])
        if (w != v[0] && w != v[1] && w != v[2])
            opp = w;
    if (n.dot(verts_[opp] - verts_[v[0]]) > 0)
        n = -n;
    return n.normalized();
}

double SimplicialComplex3::face_area(int f) const
{
    const auto& v = faces_[f];
    return 0.5 * (verts_[v[1]] - verts_[v[0]]).cross(verts_[v[2]] - verts_[v[0]]).norm();
}

int SimplicialComplex3::euler_characteristic() const
{
    return num_vertices() - num_edges() + num_faces() - num_tets();
}

int SimplicialComplex3::boundary_euler() const
{
    return nbv_ - nbe_ + nbf_;
}

const SimplicialComplex3& SimplicialComplex3::parent() const
{
    if (!parent_)
        throw MeshError("complex is not a subdivision");
    return *parent_;
}

ParentRef SimplicialComplex3::carrier(int dim, int index) const
{
    if (!parent_)
        return {dim, index};
    int first = 0;
    switch (dim) {
    case 0: first = index; break;
    case 1: first = edges_[index][0]; break;
    case 2: first = faces_[index][0]; break;
    case 3: first = tets_[index][0]; break;
    default: throw std::out_of_range("simplex dimension must be 0..3");
    }
    // the lowest index is the barycenter of the largest parent simplex
    return vertex_parent_[first];
}

std::uint64_t SimplicialComplex3::hash() const
{
    Fnv1a h;
    h.update_int(num_vertices());
    for (const auto& p : verts_)
        for (int i = 0; i < 3; ++i)
            h.update_double(p[i]);
    h.update_int(num_tets());
    for (const auto& t : tets_)
        for (int v : t)
            h.update_int(v);
    return h.digest();
}

SimplicialComplex3 generate_slab_mesh(const Vec3& extent, const Vec3& block)
{
    std::array<int, 3> n{};
    for (int a = 0; a < 3; ++a) {
        if (!(extent[a] > 0) || !(block[a] > 0))
            throw MeshError("extent and block must be positive");
        double r = extent[a] / block[a];
        long m = std::lround(r);
        if (m < 1 || std::abs(m * block[a] - extent[a]) > 1e-9 * extent[a])
            throw MeshError("dimension mismatch: extent " + std::to_string(extent[a]) +
                            " is not an integer multiple of block " + std::to_string(block[a]) + " along axis " +
                            std::to_string(a));
        n[a] = static_cast<int>(m);
    }
    const int nx = n[0], ny = n[1], nz = n[2];
    auto vid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

    std::vector<Vec3> verts;
    verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                verts.emplace_back(extent[0] * i / nx, extent[1] * j / ny, extent[2] * k / nz);

    // corners by bit pattern dx | dy<<1 | dz<<2; even corners have even bit count
    static constexpr int even[4] = {0, 3, 5, 6};
    static constexpr int odd[4] = {1, 2, 4, 7};
    std::vector<std::array<int, 4>> tets;
    tets.reserve(5 * static_cast<std::size_t>(nx) * ny * nz);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int c[8];
                for (int b = 0; b < 8; ++b)
                    c[b] = vid(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
                // mirror the split on alternate blocks so face diagonals match
                const int* mid = ((i + j + k) % 2 == 0) ? even : odd;
                const int* tips = ((i + j + k) % 2 == 0) ? odd : even;
                tets.push_back({c[mid[0]], c[mid[1]], c[mid[2]], c[mid[3]]});
                for (int q = 0; q < 4; ++q) {
                    int tip = tips[q];
                    tets.push_back({c[tip], c[tip ^ 1], c[tip ^ 2], c[tip ^ 4]});
                }
            }
    return SimplicialComplex3::from_tets(std::move(verts), std::move(tets));
}

SimplicialComplex3 barycentric_subdivide(const SimplicialComplex3& k)
{
    const int nt = k.num_tets(), nf = k.num_faces(), ne = k.num_edges(), nv = k.num_vertices();
    const int face0 = nt, edge0 = nt + nf, vert0 = nt + nf + ne;

    std::vector<Vec3> verts(static_cast<std::size_t>(vert0 + nv));
    std::vector<ParentRef> parents(verts.size());
    for (int t = 0; t < nt; ++t) {
        const auto& v = k.tet(t);
        verts[t] = 0.25 * (k.vertex(v[0]) + k.vertex(v[1]) + k.vertex(v[2]) + k.vertex(v[3]));
        parents[t] = {3, t};
    }
    for (int f = 0; f < nf; ++f) {
        const auto& v = k.face(f);
        verts[face0 + f] = (k.vertex(v[0]) + k.vertex(v[1]) + k.vertex(v[2])) / 3.0;
        parents[face0 + f] = {2, f};
    }
    for (int e = 0; e < ne; ++e) {
        const auto& v = k.edge(e);
        verts[edge0 + e] = 0.5 * (k.vertex(v[0]) + k.vertex(v[1]));
        parents[edge0 + e] = {1, e};
    }
    for (int p = 0; p < nv; ++p) {
        verts[vert0 + p] = k.vertex(p);
        parents[vert0 + p] = {0, p};
    }

    std::vector<std::array<int, 4>> tets;
    tets.reserve(24 * static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
        for (int f : k.tet_faces(t))
            for (int e : k.face_edges(f))
                for (int p : k.edge(e))
                    tets.push_back({t, face0 + f, edge0 + e, vert0 + p});

    SimplicialComplex3 kp;
    kp.verts_ = std::move(verts);
    kp.tets_ = std::move(tets);
    kp.build();
    kp.parent_ = std::make_shared<const SimplicialComplex3>(k);
    kp.vertex_parent_ = std::move(parents);
    return kp;
}

std::vector<BoundaryFaceSplit> boundary_face_splits(const SimplicialComplex3& kp)
{
    const SimplicialComplex3& k = kp.parent();
    std::vector<int> slot(k.num_faces(), -1);
    std::vector<BoundaryFaceSplit> out;
    for (int f : k.boundary_faces()) {
        slot[f] = static_cast<int>(out.size());
        out.push_back({f, {}, {}});
    }
    std::vector<int> nf(out.size(), 0);
    for (int g = 0; g < kp.num_faces(); ++g) {
        if (!kp.face_on_boundary(g))
            continue;
        ParentRef c = kp.carrier(2, g);
        if (c.dim != 2 || slot[c.index] < 0)
            throw MeshError("boundary sub-face without a boundary parent face");
        int s = slot[c.index];
        if (nf[s] == 6)
            throw MeshError("parent face split into more than six faces");
        out[s].faces[nf[s]++] = g;
    }
    // sub-edges: either inside the parent face or half of one of its edges
    for (std::size_t s = 0; s < out.size(); ++s) {
        int f = out[s].parent_face;
        std::vector<int> es;
        for (int g : out[s].faces)
            for (int e : kp.face_edges(g))
                es.push_back(e);
        std::sort(es.begin(), es.end());
        es.erase(std::unique(es.begin(), es.end()), es.end());
        if (es.size() != 12 || nf[s] != 6)
            throw MeshError("parent face " + std::to_string(f) + " does not split into 12 edges and 6 faces");
        std::copy(es.begin(), es.end(), out[s].edges.begin());
    }
    return out;
}

SimplicialComplex3 load_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MeshError("cannot open mesh file " + path);
    std::string line;
    int lineno = 0;
    auto next = [&]() -> std::string& {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos)
                return line;
        }
        throw MeshError(path + ":" + std::to_string(lineno) + ": unexpected end of file");
    };
    auto fail = [&](const std::string& what) {
        throw MeshError(path + ":" + std::to_string(lineno) + ": " + what);
    };
    auto count_line = [&](const char* word) {
        std::istringstream ss(next());
        std::string w;
        long n = -1;
        std::string rest;
        if (!(ss >> w >> n) || w != word || n < 0 || (ss >> rest))
            fail(std::string("expected '") + word + " <count>'");
        return n;
    };

    if (next() != "plates-mesh v1")
        fail("expected header 'plates-mesh v1'");
    long nv = count_line("vertices");
    std::vector<Vec3> verts(nv);
    for (long i = 0; i < nv; ++i) {
        std::istringstream ss(next());
        std::string rest;
        if (!(ss >> verts[i][0] >> verts[i][1] >> verts[i][2]) || (ss >> rest))
            fail("expected three coordinates");
    }
    long nt = count_line("tets");
    std::vector<std::array<int, 4>> tets(nt);
    for (long i = 0; i < nt; ++i) {
        std::istringstream ss(next());
        long a[4];
        std::string rest;
        if (!(ss >> a[0] >> a[1] >> a[2] >> a[3]) || (ss >> rest))
            fail("expected four vertex indices");
        for (int j = 0; j < 4; ++j) {
            if (a[j] < 0 || a[j] >= nv)
                fail("closure violation: tet references missing vertex " + std::to_string(a[j]));
            tets[i][j] = static_cast<int>(a[j]);
        }
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            fail("trailing content after tets");
    }
    try {
        return SimplicialComplex3::from_tets(std::move(verts), std::move(tets));
    } catch (const MeshError& e) {
        throw MeshError(path + ": " + e.what());
    }
}

void save_mesh(const SimplicialComplex3& k, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw MeshError("cannot write mesh file " + path);
    char buf[128];
    out << "plates-mesh v1\n";
    out << "vertices " << k.num_vertices() << "\n";
    for (const auto& p : k.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
        out << buf;
    }
    out << "tets " << k.num_tets() << "\n";
    for (int t = 0; t < k.num_tets(); ++t) {
        const auto& v = k.tet(t);
        // write a positively oriented order
        if (k.tet_sign(t) > 0)
            out << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << v[3] << '\n';
        else
            out << v[1] << ' ' << v[0] << ' ' << v[2] << ' ' << v[3] << '\n';
    }
    if (!out)
        throw MeshError("failed writing mesh file " + path);
}

}  // namespace plates
