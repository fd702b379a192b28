#include <cmath>

#include "covplan/geometry.hpp"
#include "covplan/vehicle.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace covplan;
using covplan::testing::make_box;
using covplan::testing::random_vec;
using covplan::testing::uniform;

namespace {

// Independent pyramid containment test: walk the apex->p ray to the base
// plane and check the landing point against the base rectangle edges. Returns
// a signed margin; positive means inside.
double pyramid_margin(const std::array<Vec3, 5>& v, const Vec3& p) {
  const Vec3& apex = v[4];
  const Plane base = plane_from_facet(Facet{{v[0], v[1], v[2]}});
  const double apex_side = base.eval(apex);
  // fraction of the way from apex to the base plane
  const double u = apex_side == 0.0 ? -1.0 : 1.0 - base.eval(p) / apex_side;
  if (u <= 0.0) return u == 0.0 ? (norm(p - apex) == 0.0 ? 0.0 : -1.0) : u;
  if (u > 1.0) return 1.0 - u;
  const Vec3 q = apex + (p - apex) / u;  // landing point on the base plane
  const Vec3 eu = v[1] - v[0];
  const Vec3 ev = v[3] - v[0];
  const Vec3 w = q - v[0];
  const double su = dot(w, eu) / dot(eu, eu);
  const double sv = dot(w, ev) / dot(ev, ev);
  double margin = std::min({su, 1.0 - su, sv, 1.0 - sv});
  margin = std::min(margin, std::min(u, 1.0 - u));
  return margin;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("plane_from_facet worked examples") {
    const Plane a = plane_from_facet(Facet{{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}}});
    CHECK(a.normal.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.normal.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.normal.z == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.offset == doctest::Approx(0.0).epsilon(1e-12));

    const Plane b = plane_from_facet(Facet{{Vec3{0, 0, 5}, Vec3{1, 0, 5}, Vec3{0, 1, 5}}});
    CHECK(b.normal.z == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.offset == doctest::Approx(5.0).epsilon(1e-12));

    CHECK_THROWS_AS(
        plane_from_facet(Facet{{Vec3{0, 0, 0}, Vec3{1, 1, 1}, Vec3{2, 2, 2}}}),
        DegenerateFacet);
  }

  TEST_CASE("plane vertices satisfy their plane") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
      const Facet f{{random_vec(rng, -10, 10), random_vec(rng, -10, 10),
                     random_vec(rng, -10, 10)}};
      Plane pl;
      try {
        pl = plane_from_facet(f);
      } catch (const DegenerateFacet&) {
        continue;
      }
      for (const Vec3& v : f.v) CHECK(std::abs(pl.eval(v)) <= 1e-9);
      CHECK(std::abs(norm(pl.normal) - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("flipping the winding negates normal and offset") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 50; ++k) {
      const Vec3 a = random_vec(rng, -5, 5), b = random_vec(rng, -5, 5),
                 c = random_vec(rng, -5, 5);
      Plane fwd, rev;
      try {
        fwd = plane_from_facet(Facet{{a, b, c}});
        rev = plane_from_facet(Facet{{a, c, b}});
      } catch (const DegenerateFacet&) {
        continue;
      }
      CHECK(std::abs(fwd.normal.x + rev.normal.x) <= 1e-9);
      CHECK(std::abs(fwd.normal.y + rev.normal.y) <= 1e-9);
      CHECK(std::abs(fwd.normal.z + rev.normal.z) <= 1e-9);
      CHECK(std::abs(fwd.offset + rev.offset) <= 1e-9);
    }
  }

  TEST_CASE("pyramid_halfspaces on the default downward FOV") {
    const auto v = fov_base_vertices(CameraIntrinsics{8.5, 8.5, 10.0});
    const ConvexPolytope poly = pyramid_halfspaces(v);
    REQUIRE(poly.halfspaces.size() == 5);
    // apex lies on the four side planes
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(poly.halfspaces[size_t(i)].eval(v[4])) <= 1e-9);
    }
    Vec3 centroid{};
    for (const Vec3& p : v) centroid += p;
    centroid = centroid / 5.0;
    for (const Plane& pl : poly.halfspaces) CHECK(pl.eval(centroid) < -1e-9);
    CHECK(point_in_polytope(poly, centroid));
    CHECK_FALSE(point_in_polytope(poly, Vec3{0, 0, 1}));  // above the apex

    CHECK_THROWS_AS(pyramid_halfspaces(std::array<Vec3, 5>{Vec3{-1, -1, 0}, Vec3{1, -1, 0},
                                                           Vec3{1, 1, 0}, Vec3{-1, 1, 0},
                                                           Vec3{0, 0, 0}}),
                    DegenerateFacet);
  }

  TEST_CASE("point_in_polytope unit cube") {
    const ConvexPolytope cube = convex_object_halfspaces(make_box({0, 0, 0}, {1, 1, 1}));
    CHECK(point_in_polytope(cube, Vec3{0.5, 0.5, 0.5}));
    CHECK_FALSE(point_in_polytope(cube, Vec3{1.5, 0.0, 0.0}));
    CHECK(point_in_polytope(cube, Vec3{1.0, 0.5, 0.5}, 1e-9));
  }

  TEST_CASE("pyramid containment agrees with the apex-ray oracle") {
    std::mt19937_64 rng(13);
    int compared = 0;
    for (int k = 0; k < 10000; ++k) {
      const CameraIntrinsics intr{uniform(rng, 2, 10), uniform(rng, 2, 10), uniform(rng, 3, 12)};
      const auto m0 = fov_base_vertices(intr);
      // random rotation via a catalog pose
      const double theta = uniform(rng, 0, 179);
      const double phi = uniform(rng, 0, 359);
      const CameraCatalog cat = build_camera_catalog(intr, {theta}, {phi});
      const Vec3 pos = random_vec(rng, -20, 20);
      const PosedFov fov = pose_fov(cat, 0, pos);
      const Vec3 p = random_vec(rng, -25, 25);
      const double margin = pyramid_margin(fov.vertices, p);
      if (std::abs(margin) < 1e-7) continue;  // boundary: both answers legitimate
      const bool inside = point_in_polytope(fov.polytope, p, 1e-9);
      CHECK(inside == (margin > 0.0));
      ++compared;
      (void)m0;
    }
    CHECK(compared > 9000);
  }

  TEST_CASE("ray_facet_hit worked examples") {
    const Facet f{{Vec3{-1, -1, 0}, Vec3{1, -1, 0}, Vec3{0, 1, 0}}};
    const auto hit = ray_facet_hit(Ray{Vec3{0, 0, -2}, Vec3{0, 0, 2}}, f);
    REQUIRE(hit.has_value());
    CHECK(hit->h == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(norm(hit->point - Vec3{0, 0, 0}) <= 1e-12);

    // parallel to the facet plane
    CHECK_FALSE(ray_facet_hit(Ray{Vec3{-1, 0, 1}, Vec3{1, 0, 1}}, f).has_value());
    // intersection parameter beyond the segment
    CHECK_FALSE(ray_facet_hit(Ray{Vec3{0, 0, -3}, Vec3{0, 0, -1}}, f).has_value());
  }

  TEST_CASE("ray_facet_hit point lies on the facet plane") {
    std::mt19937_64 rng(14);
    int hits = 0;
    for (int k = 0; k < 2000; ++k) {
      const Facet f{{random_vec(rng, -5, 5), random_vec(rng, -5, 5), random_vec(rng, -5, 5)}};
      Plane pl;
      try {
        pl = plane_from_facet(f);
      } catch (const DegenerateFacet&) {
        continue;
      }
      const Ray ray{random_vec(rng, -6, 6), random_vec(rng, -6, 6)};
      if (norm(ray.endpoint - ray.origin) < 1e-6) continue;
      const auto hit = ray_facet_hit(ray, f);
      if (!hit) continue;
      CHECK(std::abs(pl.eval(hit->point)) <= 1e-6);
      ++hits;
    }
    CHECK(hits > 20);
  }

  TEST_CASE("last_hit picks the facet nearest the optical center") {
    TriangleMesh mesh;
    mesh.facets.push_back(Facet{{Vec3{-5, -5, 3}, Vec3{5, -5, 3}, Vec3{0, 5, 3}}});   // h = 0.3
    mesh.facets.push_back(Facet{{Vec3{-5, -5, 6}, Vec3{5, -5, 6}, Vec3{0, 5, 6}}});   // h = 0.6
    const Ray ray{Vec3{0, 0, 0}, Vec3{0, 0, 10}};
    const auto hit = last_hit(ray, mesh);
    REQUIRE(hit.has_value());
    CHECK(*hit == 1);

    CHECK_FALSE(last_hit(ray, TriangleMesh{}).has_value());

    TriangleMesh single;
    single.facets.push_back(Facet{{Vec3{-5, -5, 5}, Vec3{5, -5, 5}, Vec3{0, 5, 5}}});
    const auto one = last_hit(ray, single);
    REQUIRE(one.has_value());
    CHECK(*one == 0);
  }

  TEST_CASE("last_hit permutation invariance") {
    std::mt19937_64 rng(15);
    for (int k = 0; k < 200; ++k) {
      TriangleMesh mesh;
      for (int i = 0; i < 8; ++i) {
        const double z = uniform(rng, 1, 9);
        mesh.facets.push_back(Facet{{Vec3{uniform(rng, -6, -2), uniform(rng, -6, -2), z},
                                     Vec3{uniform(rng, 2, 6), uniform(rng, -6, -2), z},
                                     Vec3{0, uniform(rng, 2, 6), z}}});
      }
      const Ray ray{Vec3{0, 0, 0}, Vec3{0, 0, 10}};
      const auto a = last_hit(ray, mesh);
      TriangleMesh reversed;
      reversed.facets.assign(mesh.facets.rbegin(), mesh.facets.rend());
      const auto b = last_hit(ray, reversed);
      if (a.has_value()) {
        REQUIRE(b.has_value());
        // map the reversed index back
        CHECK(*a == mesh.facets.size() - 1 - *b);
      } else {
        CHECK_FALSE(b.has_value());
      }
    }
  }

  TEST_CASE("convex_object_halfspaces") {
    const ConvexPolytope box = convex_object_halfspaces(make_box({0, 0, 0}, {2, 3, 4}));
    CHECK(box.halfspaces.size() == 6);

    TriangleMesh tetra;
    tetra.id = "tetra";
    const Vec3 a{1, 1, 1}, b{1, -1, -1}, c{-1, 1, -1}, d{-1, -1, 1};
    tetra.facets = {Facet{{a, b, c}}, Facet{{a, d, b}}, Facet{{a, c, d}}, Facet{{b, d, c}}};
    // orient outward: regular tetrahedron centered at origin
    const ConvexPolytope tp = convex_object_halfspaces(tetra);
    CHECK(tp.halfspaces.size() == 4);
    CHECK(point_in_polytope(tp, Vec3{0, 0, 0}));

    TriangleMesh saddle;
    saddle.facets = {Facet{{Vec3{0, 0, 0}, Vec3{2, 0, 0}, Vec3{1, 1, 2}}},
                     Facet{{Vec3{2, 0, 0}, Vec3{4, 0, 0}, Vec3{3, 1, -2}}},
                     Facet{{Vec3{0, 0, 4}, Vec3{4, 4, 4}, Vec3{2, 2, -4}}}};
    CHECK_THROWS_AS(convex_object_halfspaces(saddle), NonConvexInput);
  }
}
