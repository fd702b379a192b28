#include "covplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace covplan {

namespace {
constexpr double kAreaEps = 1e-12;
constexpr double kDenomEps = 1e-9;
constexpr double kBaryTol = 1e-9;
constexpr double kPlaneMergeTol = 1e-9;
constexpr double kConvexTol = 1e-6;
}  // namespace

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}

bool Aabb::overlaps(const Aabb& o) const {
  return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y &&
         lo.z <= o.hi.z && o.lo.z <= hi.z;
}

bool Aabb::contains(const Vec3& p) const {
  return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
}

Aabb TriangleMesh::bounds() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Aabb b{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const Facet& f : facets) {
    for (const Vec3& v : f.v) {
      b.lo.x = std::min(b.lo.x, v.x);
      b.lo.y = std::min(b.lo.y, v.y);
      b.lo.z = std::min(b.lo.z, v.z);
      b.hi.x = std::max(b.hi.x, v.x);
      b.hi.y = std::max(b.hi.y, v.y);
      b.hi.z = std::max(b.hi.z, v.z);
    }
  }
  return b;
}

Plane plane_from_facet(const Facet& f) {
  const Vec3 n = cross(f.v[1] - f.v[0], f.v[2] - f.v[0]);
  const double len = norm(n);
  if (0.5 * len <= kAreaEps) {
    throw DegenerateFacet("facet area below 1e-12 m^2");
  }
  const Vec3 unit = n / len;
  return Plane{unit, dot(unit, f.v[0])};
}

ConvexPolytope pyramid_halfspaces(const std::array<Vec3, 5>& vertices) {
  const Vec3& apex = vertices[4];
  Vec3 centroid{};
  for (const Vec3& v : vertices) centroid += v;
  centroid = centroid / 5.0;

  ConvexPolytope poly;
  auto add_face = [&](const Vec3& a, const Vec3& b, const Vec3& c) {
    Plane pl = plane_from_facet(Facet{{a, b, c}});
    const double side = pl.eval(centroid);
    if (std::abs(side) <= kDenomEps) {
      throw DegenerateFacet("flat pyramid: centroid on a face plane");
    }
    if (side > 0.0) {
      pl.normal = pl.normal * -1.0;
      pl.offset = -pl.offset;
    }
    poly.halfspaces.push_back(pl);
  };

  for (int i = 0; i < 4; ++i) add_face(vertices[i], vertices[(i + 1) % 4], apex);
  add_face(vertices[0], vertices[1], vertices[2]);  // base
  return poly;
}

bool point_in_polytope(const ConvexPolytope& poly, const Vec3& p, double tol) {
  for (const Plane& pl : poly.halfspaces) {
    if (pl.eval(p) > tol) return false;
  }
  return true;
}

std::optional<RayHit> ray_facet_hit(const Ray& ray, const Facet& facet) {
  const Plane pl = plane_from_facet(facet);
  const Vec3 dir = ray.endpoint - ray.origin;
  const double denom = dot(pl.normal, dir);
  if (std::abs(denom) <= kDenomEps) return std::nullopt;  // parallel to the facet
  const double h = (pl.offset - dot(pl.normal, ray.origin)) / denom;
  if (h < 0.0 || h > 1.0) return std::nullopt;
  const Vec3 p = ray.at(h);

  // Barycentric containment in the facet's triangle.
  const Vec3 e1 = facet.v[1] - facet.v[0];
  const Vec3 e2 = facet.v[2] - facet.v[0];
  const Vec3 w = p - facet.v[0];
  const double d11 = dot(e1, e1), d12 = dot(e1, e2), d22 = dot(e2, e2);
  const double dw1 = dot(w, e1), dw2 = dot(w, e2);
  const double det = d11 * d22 - d12 * d12;
  const double s = (d22 * dw1 - d12 * dw2) / det;
  const double t = (d11 * dw2 - d12 * dw1) / det;
  const double u = 1.0 - s - t;
  const double lo = -kBaryTol, hi = 1.0 + kBaryTol;
  if (s < lo || s > hi || t < lo || t > hi || u < lo || u > hi) return std::nullopt;
  return RayHit{h, p};
}

std::optional<std::size_t> last_hit(const Ray& ray, const TriangleMesh& mesh) {
  std::optional<std::size_t> best;
  double best_h = -1.0;
  for (std::size_t i = 0; i < mesh.facets.size(); ++i) {
    const auto hit = ray_facet_hit(ray, mesh.facets[i]);
    if (hit && hit->h > best_h + kDenomEps) {
      best_h = hit->h;
      best = i;
    }
  }
  return best;
}

ConvexPolytope convex_object_halfspaces(const TriangleMesh& mesh) {
  ConvexPolytope poly;
  for (const Facet& f : mesh.facets) {
    const Plane pl = plane_from_facet(f);
    bool dup = false;
    for (const Plane& q : poly.halfspaces) {
      if (std::abs(pl.normal.x - q.normal.x) <= kPlaneMergeTol &&
          std::abs(pl.normal.y - q.normal.y) <= kPlaneMergeTol &&
          std::abs(pl.normal.z - q.normal.z) <= kPlaneMergeTol &&
          std::abs(pl.offset - q.offset) <= kPlaneMergeTol) {
        dup = true;
        break;
      }
    }
    if (!dup) poly.halfspaces.push_back(pl);
  }
  for (const Facet& f : mesh.facets) {
    for (const Vec3& v : f.v) {
      for (const Plane& pl : poly.halfspaces) {
        if (pl.eval(v) > kConvexTol) {
          throw NonConvexInput("mesh vertex violates a facet plane by more than 1e-6");
        }
      }
    }
  }
  return poly;
}

}  // namespace covplan
