#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace covplan {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(const Vec3& a);
Vec3 normalized(const Vec3& a);

struct Aabb {
  Vec3 lo, hi;
  bool overlaps(const Aabb& o) const;
  bool contains(const Vec3& p) const;
};

/// Oriented halfspace boundary: a point p is on the inner side when
/// dot(normal, p) <= offset. `normal` is unit length.
struct Plane {
  Vec3 normal;
  double offset = 0.0;
  double eval(const Vec3& p) const { return dot(normal, p) - offset; }
};

struct Facet {
  std::array<Vec3, 3> v;
};

struct TriangleMesh {
  std::vector<Facet> facets;
  std::string id;
  Aabb bounds() const;
};

struct ConvexPolytope {
  std::vector<Plane> halfspaces;
};

/// Light ray modelled as the segment from a fixed point on the camera FOV
/// base (origin) to the optical center (endpoint). Parameter h in [0,1]
/// walks from origin to endpoint.
struct Ray {
  Vec3 origin;
  Vec3 endpoint;
  Vec3 at(double h) const { return origin + (endpoint - origin) * h; }
};

struct DegenerateFacet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvexInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plane through the facet with the normal following the right-hand rule on
/// the winding order. Throws DegenerateFacet when the triangle area is below
/// 1e-12 m^2.
Plane plane_from_facet(const Facet& f);

/// Halfspace form of a 5-vertex right pyramid (4 base corners, then apex).
/// Returns 5 outward-oriented planes: the 4 triangular sides first, the base
/// last. The pyramid centroid strictly satisfies every inequality.
ConvexPolytope pyramid_halfspaces(const std::array<Vec3, 5>& vertices);

bool point_in_polytope(const ConvexPolytope& poly, const Vec3& p, double tol = 1e-9);

struct RayHit {
  double h = 0.0;
  Vec3 point;
};

/// Intersection of a light ray with the facet's triangle. Empty when the ray
/// is parallel to the facet plane, h falls outside [0,1], or the hit point is
/// outside the triangle.
std::optional<RayHit> ray_facet_hit(const Ray& ray, const Facet& facet);

/// Index of the facet the ray intersects closest to the optical center
/// (maximal h). Ties within 1e-9 go to the lowest facet index.
std::optional<std::size_t> last_hit(const Ray& ray, const TriangleMesh& mesh);

/// Halfspace representation of a convex mesh: one plane per facet,
/// deduplicated. Throws NonConvexInput if any vertex violates a facet plane
/// by more than 1e-6.
ConvexPolytope convex_object_halfspaces(const TriangleMesh& mesh);

}  // namespace covplan
