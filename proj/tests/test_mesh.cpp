#include <doctest.h>

#include "plates/mesh.hpp"

#include <cstdio>
#include <filesystem>
#include <set>

using namespace plates;

namespace {

const Vec3 kSlabExtent(0.10, 0.01, 0.20);
const Vec3 kSlabBlock(0.01, 0.005, 0.01);

SimplicialComplex3 cube() { return generate_slab_mesh(Vec3(0.01, 0.01, 0.01), Vec3(0.01, 0.01, 0.01)); }

}  // namespace

TEST_CASE("single block splits into five tets")
{
    auto k = cube();
    CHECK(k.num_vertices() == 8);
    CHECK(k.num_edges() == 18);
    CHECK(k.num_faces() == 16);
    CHECK(k.num_tets() == 5);
    CHECK(k.euler_characteristic() == 1);
    CHECK(k.boundary_euler() == 2);
    CHECK(k.total_volume() == doctest::Approx(1e-6).epsilon(1e-12));
    for (int t = 0; t < k.num_tets(); ++t)
        CHECK(k.tet_volume(t) > 0);
}

TEST_CASE("slab counts")
{
    auto k = generate_slab_mesh(kSlabExtent, kSlabBlock);
    CHECK(k.num_vertices() == 693);
    CHECK(k.num_edges() == 3212);
    CHECK(k.num_faces() == 4520);
    CHECK(k.num_tets() == 2000);
    CHECK(k.num_boundary_vertices() == 522);
    CHECK(k.num_boundary_edges() == 1560);
    CHECK(k.num_boundary_faces() == 1040);
    CHECK(k.euler_characteristic() == 1);
    CHECK(k.boundary_euler() == 2);

    auto kp = barycentric_subdivide(k);
    CHECK(kp.num_vertices() == 10425);
    CHECK(kp.num_edges() == 61544);
    CHECK(kp.num_faces() == 99120);
    CHECK(kp.num_tets() == 48000);
    CHECK(kp.num_boundary_vertices() == 3122);
    CHECK(kp.num_boundary_edges() == 9360);
    CHECK(kp.num_boundary_faces() == 6240);
    CHECK(kp.euler_characteristic() == 1);
    CHECK(kp.boundary_euler() == 2);
    CHECK(std::abs(kp.total_volume() - k.total_volume()) <= 1e-12 * k.total_volume());
}

TEST_CASE("subdivision multiplies tets by 24 and keeps the volume")
{
    auto k = generate_slab_mesh(Vec3(0.02, 0.01, 0.02), Vec3(0.01, 0.01, 0.01));
    auto kp = barycentric_subdivide(k);
    CHECK(kp.num_tets() == 24 * k.num_tets());
    CHECK(std::abs(kp.total_volume() - k.total_volume()) <= 1e-12 * k.total_volume());
    CHECK(kp.is_subdivision());
    CHECK(&kp.parent() != nullptr);
    for (int t = 0; t < kp.num_tets(); ++t) {
        const int parent = kp.tet_parent(t);
        REQUIRE(parent >= 0);
        REQUIRE(parent < k.num_tets());
    }
    CHECK_THROWS_AS(k.parent(), MeshError);
}

TEST_CASE("boundary incidence is exact")
{
    auto kp = barycentric_subdivide(cube());
    for (int f = 0; f < kp.num_faces(); ++f) {
        const auto& ft = kp.face_tets(f);
        if (ft[1] < 0) {
            CHECK(kp.face_on_boundary(f));
            continue;
        }
        CHECK(kp.b_ft(f, ft[0]) == -kp.b_ft(f, ft[1]));
    }
    // d d = 0 on every chain
    for (int t = 0; t < kp.num_tets(); ++t)
        for (int e : kp.tet_edges(t)) {
            int s = 0;
            for (int f : kp.tet_faces(t))
                s += kp.b_ef(e, f) * kp.b_ft(f, t);
            CHECK(s == 0);
        }
    for (int f = 0; f < kp.num_faces(); ++f)
        for (int p : kp.face(f)) {
            int s = 0;
            for (int e : kp.face_edges(f))
                s += kp.b_pe(p, e) * kp.b_ef(e, f);
            CHECK(s == 0);
        }
}

TEST_CASE("dimension mismatch is rejected")
{
    CHECK_THROWS_AS(generate_slab_mesh(Vec3(0.1, 0.01, 0.2), Vec3(0.03, 0.005, 0.01)), MeshError);
    CHECK_THROWS_AS(generate_slab_mesh(Vec3(0.1, 0.01, 0.2), Vec3(0.0, 0.005, 0.01)), MeshError);
    CHECK_THROWS_AS(SimplicialComplex3::from_tets({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)},
                                                  {{0, 1, 2, 3}}),
                    MeshError);
}

TEST_CASE("mesh files round trip")
{
    auto k = generate_slab_mesh(Vec3(0.02, 0.01, 0.03), Vec3(0.01, 0.005, 0.01));
    const auto path = (std::filesystem::temp_directory_path() / "plates_test_mesh.txt").string();
    save_mesh(k, path);
    auto back = load_mesh(path);
    std::remove(path.c_str());
    CHECK(back.hash() == k.hash());
    CHECK(back.num_tets() == k.num_tets());
    CHECK_THROWS_AS(load_mesh(path), MeshError);
}

TEST_CASE("boundary faces of the parent split into 12 edges and 6 faces")
{
    auto k = generate_slab_mesh(Vec3(0.02, 0.01, 0.02), Vec3(0.01, 0.01, 0.01));
    auto kp = barycentric_subdivide(k);
    auto splits = boundary_face_splits(kp);
    CHECK(static_cast<int>(splits.size()) == k.num_boundary_faces());
    std::set<int> seen;
    for (const auto& s : splits) {
        for (int f : s.faces) {
            CHECK(kp.face_on_boundary(f));
            CHECK(seen.insert(f).second);
        }
        for (int e : s.edges)
            CHECK(kp.edge_on_boundary(e));
    }
    CHECK(static_cast<int>(seen.size()) == kp.num_boundary_faces());
}
