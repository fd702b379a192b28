#include <cmath>

#include "covplan/vehicle.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace covplan;
using covplan::testing::random_vec;
using covplan::testing::uniform;

TEST_SUITE("vehicle") {
  TEST_CASE("step_dynamics worked examples") {
    const DynamicsParams def{};
    SUBCASE("rest is a fixed point") {
      const AgentState s = step_dynamics(AgentState{}, ControlInput{}, def);
      CHECK(s.pos.x == 0.0);
      CHECK(s.vel.x == 0.0);
    }
    SUBCASE("coasting decays velocity by the drag factor") {
      const AgentState s =
          step_dynamics(AgentState{Vec3{0, 0, 0}, Vec3{1, 0, 0}}, ControlInput{}, def);
      CHECK(s.pos.x == 1.0);
      CHECK(s.vel.x == 0.7);
    }
    SUBCASE("unit force over the mass") {
      const AgentState s =
          step_dynamics(AgentState{}, ControlInput{Vec3{1.75, 0, 0}}, def);
      CHECK(s.pos.x == 0.0);
      CHECK(s.vel.x == 1.0);
    }
  }

  TEST_CASE("step_dynamics is linear in state and input") {
    std::mt19937_64 rng(21);
    const DynamicsParams def{};
    for (int k = 0; k < 200; ++k) {
      const AgentState s1{random_vec(rng, -10, 10), random_vec(rng, -5, 5)};
      const AgentState s2{random_vec(rng, -10, 10), random_vec(rng, -5, 5)};
      const ControlInput u1{random_vec(rng, -10, 10)}, u2{random_vec(rng, -10, 10)};
      const double a = uniform(rng, -2, 2), b = uniform(rng, -2, 2);
      const AgentState mix{s1.pos * a + s2.pos * b, s1.vel * a + s2.vel * b};
      const ControlInput umix{u1.force * a + u2.force * b};
      const AgentState lhs = step_dynamics(mix, umix, def);
      const AgentState r1 = step_dynamics(s1, u1, def);
      const AgentState r2 = step_dynamics(s2, u2, def);
      CHECK(norm(lhs.pos - (r1.pos * a + r2.pos * b)) <= 1e-9);
      CHECK(norm(lhs.vel - (r1.vel * a + r2.vel * b)) <= 1e-9);
    }
  }

  TEST_CASE("catalog size and ordering") {
    const CameraCatalog cat = build_camera_catalog(CameraIntrinsics{}, {30, 70, 110, 150},
                                                   {30, 90, 150, 210, 270, 330});
    REQUIRE(cat.poses.size() == 24);
    // row-major theta x phi
    CHECK(cat.poses[0].theta_deg == 30);
    CHECK(cat.poses[0].phi_deg == 30);
    CHECK(cat.poses[5].theta_deg == 30);
    CHECK(cat.poses[5].phi_deg == 330);
    CHECK(cat.poses[6].theta_deg == 70);
    CHECK(cat.poses[6].phi_deg == 30);
  }

  TEST_CASE("identity rotation reproduces the origin-centered FOV") {
    const CameraIntrinsics intr{};
    const CameraCatalog cat = build_camera_catalog(intr, {0}, {0});
    REQUIRE(cat.poses.size() == 1);
    const auto m0 = fov_base_vertices(intr);
    for (int i = 0; i < 5; ++i) {
      CHECK(norm(cat.poses[0].vertices[size_t(i)] - m0[size_t(i)]) <= 1e-12);
    }
  }

  TEST_CASE("theta=90 sends the base center to -x") {
    const CameraIntrinsics intr{8.5, 8.5, 10.0};
    const CameraCatalog cat = build_camera_catalog(intr, {90}, {0});
    Vec3 base_center{};
    for (int i = 0; i < 4; ++i) base_center += cat.poses[0].vertices[size_t(i)];
    base_center = base_center / 4.0;
    CHECK(norm(base_center - Vec3{-10, 0, 0}) <= 1e-9);
  }

  TEST_CASE("rotations preserve pairwise distances and fix the apex") {
    const CameraIntrinsics intr{};
    const auto m0 = fov_base_vertices(intr);
    const CameraCatalog cat = build_camera_catalog(intr, {30, 70, 110, 150},
                                                   {30, 90, 150, 210, 270, 330});
    for (const CameraPose& pose : cat.poses) {
      CHECK(norm(pose.vertices[4]) <= 1e-12);  // optical center stays at the origin
      for (int i = 0; i < 5; ++i) {
        for (int j = i + 1; j < 5; ++j) {
          const double want = norm(m0[size_t(i)] - m0[size_t(j)]);
          const double got = norm(pose.vertices[size_t(i)] - pose.vertices[size_t(j)]);
          CHECK(std::abs(want - got) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("pose_fov translation") {
    const CameraCatalog cat = build_camera_catalog(CameraIntrinsics{}, {30, 70}, {0, 90});
    SUBCASE("zero translation is the catalog pose") {
      const PosedFov fov = pose_fov(cat, 1, Vec3{});
      for (int i = 0; i < 5; ++i) {
        CHECK(norm(fov.vertices[size_t(i)] - cat.poses[1].vertices[size_t(i)]) == 0.0);
      }
    }
    SUBCASE("translation shifts vertices and offsets consistently") {
      const Vec3 pos{10, 0, 0};
      const PosedFov fov = pose_fov(cat, 2, pos);
      for (int i = 0; i < 5; ++i) {
        CHECK(norm(fov.vertices[size_t(i)] - (cat.poses[2].vertices[size_t(i)] + pos)) <= 1e-12);
      }
      for (int i = 0; i < 5; ++i) {
        const Plane& rel = cat.poses[2].faces[size_t(i)];
        const Plane& abs = fov.polytope.halfspaces[size_t(i)];
        CHECK(std::abs(abs.offset - (rel.offset + 10.0 * rel.normal.x)) <= 1e-12);
      }
    }
    SUBCASE("apex equals the agent position") {
      const Vec3 pos{3, -4, 7};
      const PosedFov fov = pose_fov(cat, 0, pos);
      CHECK(norm(fov.vertices[4] - pos) == 0.0);
    }
    SUBCASE("posed vertices sit on the polytope boundary") {
      std::mt19937_64 rng(22);
      for (int k = 0; k < 20; ++k) {
        const Vec3 pos = random_vec(rng, -20, 20);
        const PosedFov fov = pose_fov(cat, size_t(k) % cat.poses.size(), pos);
        for (const Vec3& v : fov.vertices) {
          CHECK(point_in_polytope(fov.polytope, v, 1e-6));
        }
      }
    }
    CHECK_THROWS_AS(pose_fov(cat, 99, Vec3{}), std::out_of_range);
  }

  TEST_CASE("ray_bundle layouts") {
    const CameraCatalog cat = build_camera_catalog(CameraIntrinsics{8.5, 8.5, 10.0}, {0}, {0});
    const PosedFov fov = pose_fov(cat, 0, Vec3{1, 2, 30});

    SUBCASE("single ray starts at the base center") {
      const RayBundle b = ray_bundle(fov.vertices, 1);
      REQUIRE(b.rays.size() == 1);
      Vec3 center{};
      for (int i = 0; i < 4; ++i) center += fov.vertices[size_t(i)];
      center = center / 4.0;
      CHECK(norm(b.rays[0].origin - center) <= 1e-9);
      CHECK(norm(b.rays[0].endpoint - fov.vertices[4]) == 0.0);
    }
    SUBCASE("h=1 evaluates to the optical center") {
      const RayBundle b = ray_bundle(fov.vertices, 7);
      for (const Ray& r : b.rays) CHECK(norm(r.at(1.0) - fov.vertices[4]) <= 1e-12);
    }
    SUBCASE("50 origins stay on the base plane inside the rectangle") {
      const RayBundle b = ray_bundle(fov.vertices, 50);
      REQUIRE(b.rays.size() == 50);
      const Plane base = plane_from_facet(
          Facet{{fov.vertices[0], fov.vertices[1], fov.vertices[2]}});
      for (const Ray& r : b.rays) {
        CHECK(std::abs(base.eval(r.origin)) <= 1e-9);
        CHECK(std::abs(r.origin.x - 1.0) <= 4.25 + 1e-9);
        CHECK(std::abs(r.origin.y - 2.0) <= 4.25 + 1e-9);
      }
    }
  }

  TEST_CASE("catalog hash tracks the inputs") {
    const CameraCatalog a = build_camera_catalog(CameraIntrinsics{}, {30, 70}, {0, 90});
    const CameraCatalog b = build_camera_catalog(CameraIntrinsics{}, {30, 70}, {0, 90});
    const CameraCatalog c = build_camera_catalog(CameraIntrinsics{}, {30, 71}, {0, 90});
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
  }
}
