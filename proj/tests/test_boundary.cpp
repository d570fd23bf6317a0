#include <doctest.h>

#include "oracles/small.hpp"
#include "oracles/weak_form.hpp"
#include "plates/assembly.hpp"
#include "plates/boundary_conditions.hpp"

#include <Eigen/Dense>

#include <random>

using namespace plates;

namespace {

// the cube of five tets under a fixed non-orthogonal affine map
SimplicialComplex3 sheared_cube(const Eigen::Matrix3d& a)
{
    auto k = generate_slab_mesh(Vec3(0.01, 0.01, 0.01), Vec3(0.01, 0.01, 0.01));
    std::vector<Vec3> v;
    for (int p = 0; p < k.num_vertices(); ++p)
        v.push_back(a * k.vertex(p));
    std::vector<std::array<int, 4>> t(k.tets().begin(), k.tets().end());
    return SimplicialComplex3::from_tets(v, t);
}

const Eigen::Matrix3d kShear = (Eigen::Matrix3d() << 1.0, 0.31, -0.17, 0.12, 0.9, 0.23, -0.08, 0.27, 1.1).finished();

// the 2 x 18 block rebuilt from the oracle fields
Eigen::Matrix<double, 2, 18> oracle_block(const SimplicialComplex3& kp, const ElasticTensor& w,
                                          const ConstraintBlock& blk, bool traction)
{
    const auto& k = kp.parent();
    const auto& fv = k.face(blk.parent_face);
    const Vec3 p0 = k.vertex(fv[0]), p1 = k.vertex(fv[1]), p2 = k.vertex(fv[2]);
    Vec3 n = (p1 - p0).cross(p2 - p0).normalized();
    // orient away from the fourth vertex of the incident tet
    const int t = k.face_tets(blk.parent_face)[0];
    for (int q : k.tet(t))
        if (q != fv[0] && q != fv[1] && q != fv[2] && n.dot(k.vertex(q) - p0) > 0)
            n = -n;
    Vec3 longest = p1 - p0;
    for (const Vec3& e : {Vec3(p2 - p1), Vec3(p2 - p0)})
        if (e.norm() > longest.norm() * (1 + 1e-12))
            longest = e;
    // sign of t1 follows the stored edge orientation; the rank is unaffected
    const Vec3 t1 = (longest - longest.dot(n) * n).normalized();
    const Vec3 t2 = n.cross(t1);
    const Vec3 wn = oracle::boundary_stress(w, n);

    Eigen::Matrix<double, 2, 18> rows = Eigen::Matrix<double, 2, 18>::Zero();
    std::array<Vec3, 10> val;
    std::array<Eigen::Matrix3d, 10> jac;
    for (int s = 0; s < 6; ++s) {
        const int f = blk.faces[s];
        const int tt = kp.face_tets(f)[0];
        oracle::TetBasis tb(kp, tt);
        tb.fields(oracle::Bary::Constant(0.25), val, jac);
        const auto& sv = kp.face(f);
        const double area = 0.5 * (kp.vertex(sv[1]) - kp.vertex(sv[0])).cross(kp.vertex(sv[2]) - kp.vertex(sv[0])).norm();
        for (int a = 0; a < 10; ++a) {
            int col = -1;
            const int id = tb.ids[a];
            if (id < kp.num_edges()) {
                auto it = std::find(blk.edges.begin(), blk.edges.end(), id);
                if (it == blk.edges.end() || !kp.edge_on_boundary(id))
                    continue;
                // only edges of this sub-face
                const auto& ev = kp.edge(id);
                if (std::find(sv.begin(), sv.end(), ev[0]) == sv.end() || std::find(sv.begin(), sv.end(), ev[1]) == sv.end())
                    continue;
                col = static_cast<int>(it - blk.edges.begin());
            } else if (id - kp.num_edges() == f) {
                col = 12 + s;
            } else {
                continue;
            }
            const Vec3 tt2[2] = {t1, t2};
            for (int r = 0; r < 2; ++r) {
                double v = (jac[a] * tt2[r]).dot(wn);
                if (traction)
                    v += tt2[r].dot(oracle::stress(w, jac[a]) * n);
                rows(r, col) += area * v;
            }
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("boundary frames are orthonormal and exterior")
{
    auto k = sheared_cube(kShear);
    for (int f : k.boundary_faces()) {
        FaceFrame fr = boundary_frame(k, f);
        CHECK(std::abs(fr.t1.norm() - 1) <= 1e-12);
        CHECK(std::abs(fr.t2.norm() - 1) <= 1e-12);
        CHECK(std::abs(fr.n.norm() - 1) <= 1e-12);
        CHECK(std::abs(fr.t1.dot(fr.t2)) <= 1e-12);
        CHECK(std::abs(fr.t1.dot(fr.n)) <= 1e-12);
        CHECK((fr.n.cross(fr.t1) - fr.t2).norm() <= 1e-12);
        const int t = k.face_tets(f)[0];
        Vec3 c = Vec3::Zero();
        for (int p : k.tet(t))
            c += 0.25 * k.vertex(p);
        CHECK(fr.n.dot(k.vertex(k.face(f)[0]) - c) > 0);
    }
}

TEST_CASE("axis-aligned slabs give vanishing face subblocks")
{
    auto kp = barycentric_subdivide(generate_slab_mesh(Vec3(0.02, 0.01, 0.04), Vec3(0.01, 0.005, 0.01)));
    ElasticTensor w = spruce_engelmann();
    auto red = boundary_condition_system(kp, w);
    CHECK(static_cast<int>(red.blocks.size()) == kp.parent().num_boundary_faces());
    MESSAGE("ranks 0/1/2: ", red.rank_zero, "/", red.rank_one, "/", red.rank_two);
    CHECK(red.rank_zero == static_cast<int>(red.blocks.size()));
    for (const auto& b : red.blocks)
        CHECK(b.rows.rightCols<6>().norm() <= 1e-10 * b.rows.norm());
    auto emb = fine_embedding(coarse_basis(kp), red);
    CHECK(emb.P.cols() == fine_dimension_formula(kp, red));
}

TEST_CASE("constraint blocks agree with the oracle")
{
    for (bool traction : {true, false}) {
        for (const ElasticTensor& w : {isotropic(1e9, 4e8, 0.25, 500), spruce_engelmann()}) {
            auto kp = barycentric_subdivide(sheared_cube(kShear));
            auto red = boundary_condition_system(kp, w, traction ? ConstraintKind::Traction : ConstraintKind::StressOnly);
            for (const auto& b : red.blocks) {
                auto ref = oracle_block(kp, w, b, traction);
                // t1 may point either way along the longest edge
                const double d1 = (b.rows - ref).norm();
                Eigen::Matrix<double, 2, 18> flipped = ref;
                flipped.row(0) = -ref.row(0);
                flipped.row(1) = -ref.row(1);
                const double d2 = (b.rows - flipped).norm();
                CHECK(std::min(d1, d2) <= 1e-9 * ref.norm());

                auto [s1, s2] = oracle::singular_values_2xn(ref.rightCols<6>());
                CHECK(std::abs(b.sigma1 - s1) <= 1e-9 * s1 + 1e-12 * ref.norm());
                CHECK(std::abs(b.sigma2 - s2) <= 1e-9 * s1 + 1e-12 * ref.norm());
                const int rank = s1 <= 1e-10 * ref.norm() ? 0 : (s2 <= 1e-10 * s1 ? 1 : 2);
                CHECK(b.rank == rank);
            }
        }
    }
}

TEST_CASE("sheared mesh exercises the eliminations")
{
    auto kp = barycentric_subdivide(sheared_cube(kShear));
    ElasticTensor w = spruce_engelmann();
    auto coarse = coarse_basis(kp);
    for (auto kind : {ConstraintKind::Traction, ConstraintKind::StressOnly}) {
        auto red = boundary_condition_system(kp, w, kind);
        MESSAGE("ranks 0/1/2: ", red.rank_zero, "/", red.rank_one, "/", red.rank_two);
        CHECK(red.rank_two + red.rank_one > 0);
        auto emb = fine_embedding(coarse, red);
        CHECK(emb.P.cols() == fine_dimension_formula(kp, red));
        CHECK(emb.basis.count(BasisPart::FaceBoundaryB) == 2 * red.rank_two + red.rank_one);

        // every embedded vector satisfies the rows kept by each block
        std::mt19937_64 rng(4);
        std::normal_distribution<double> nd(0, 1);
        for (int trial = 0; trial < 3; ++trial) {
            Eigen::VectorXd c(emb.P.cols());
            for (auto& x : c)
                x = nd(rng);
            Eigen::VectorXd u = emb.P * c;
            double worst = 0;
            for (const auto& b : red.blocks) {
                if (b.rank == 0)
                    continue;
                Eigen::Matrix<double, 18, 1> local;
                for (int e = 0; e < 12; ++e)
                    local[e] = u[coarse.edge_id(b.edges[e])];
                for (int f = 0; f < 6; ++f)
                    local[12 + f] = u[coarse.face_id(b.faces[f])];
                Eigen::Vector2d r = b.rows * local;
                if (b.rank == 1) {
                    // only the dominant row is imposed
                    Eigen::JacobiSVD<Eigen::Matrix<double, 2, 6>> svd(b.rows.rightCols<6>(), Eigen::ComputeFullU);
                    r = Eigen::Vector2d(svd.matrixU().col(0).dot(r), 0.0);
                }
                worst = std::max(worst, r.norm() / (b.rows.norm() * local.norm()));
            }
            CHECK(worst <= 1e-10);
        }
    }
}

TEST_CASE("blocks of a vanishing constraint are reported")
{
    auto kp = barycentric_subdivide(sheared_cube(kShear));
    ElasticTensor zero(Matrix6d::Zero(), 1.0);
    CHECK_THROWS_AS(boundary_condition_system(kp, zero), ConstraintError);
    auto k = barycentric_subdivide(sheared_cube(kShear));
    auto coarse = assemble_coarse(k, spruce_engelmann(), 1.0);
    FineEmbedding bad;
    bad.P.resize(3, 3);
    CHECK_THROWS_AS(assemble_fine(coarse, bad), ConstraintError);
}
