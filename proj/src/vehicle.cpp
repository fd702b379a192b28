#include "covplan/vehicle.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace covplan {

AgentState step_dynamics(const AgentState& s, const ControlInput& u, const DynamicsParams& p) {
  AgentState out;
  out.pos = {s.pos.x + p.dt * s.vel.x, s.pos.y + p.dt * s.vel.y, s.pos.z + p.dt * s.vel.z};
  const double k = 1.0 - p.drag;
  const double b = p.dt / p.mass;
  out.vel = {k * s.vel.x + b * u.force.x, k * s.vel.y + b * u.force.y,
             k * s.vel.z + b * u.force.z};
  return out;
}

std::array<Vec3, 5> fov_base_vertices(const CameraIntrinsics& intr) {
  const double hl = intr.base_len / 2.0;
  const double hw = intr.base_wid / 2.0;
  const double cr = intr.range;
  return {Vec3{-hl, hw, -cr}, Vec3{hl, hw, -cr}, Vec3{hl, -hw, -cr}, Vec3{-hl, -hw, -cr},
          Vec3{0.0, 0.0, 0.0}};
}

namespace {

Vec3 rot_y(const Vec3& v, double c, double s) {
  return {c * v.x + s * v.z, v.y, -s * v.x + c * v.z};
}

Vec3 rot_z(const Vec3& v, double c, double s) {
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

std::uint64_t fnv1a(std::uint64_t h, const char* data, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a_real(std::uint64_t h, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return fnv1a(h, buf, static_cast<std::size_t>(n));
}

}  // namespace

std::uint64_t CameraCatalog::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  h = fnv1a_real(h, intrinsics.base_len);
  h = fnv1a_real(h, intrinsics.base_wid);
  h = fnv1a_real(h, intrinsics.range);
  for (double t : theta_set) h = fnv1a_real(h, t);
  for (double p : phi_set) h = fnv1a_real(h, p);
  return h;
}

CameraCatalog build_camera_catalog(const CameraIntrinsics& intr,
                                   const std::vector<double>& theta_deg,
                                   const std::vector<double>& phi_deg) {
  if (theta_deg.empty() || phi_deg.empty()) {
    throw std::invalid_argument("camera angle sets must be non-empty");
  }
  CameraCatalog cat;
  cat.intrinsics = intr;
  cat.theta_set = theta_deg;
  cat.phi_set = phi_deg;
  const auto m0 = fov_base_vertices(intr);
  constexpr double deg = std::numbers::pi / 180.0;
  for (double theta : theta_deg) {
    const double ct = std::cos(theta * deg), st = std::sin(theta * deg);
    for (double phi : phi_deg) {
      const double cp = std::cos(phi * deg), sp = std::sin(phi * deg);
      CameraPose pose;
      pose.theta_deg = theta;
      pose.phi_deg = phi;
      for (int i = 0; i < 5; ++i) pose.vertices[i] = rot_z(rot_y(m0[i], ct, st), cp, sp);
      const ConvexPolytope hull = pyramid_halfspaces(pose.vertices);
      for (int i = 0; i < 5; ++i) pose.faces[i] = hull.halfspaces[i];
      cat.poses.push_back(pose);
    }
  }
  return cat;
}

PosedFov pose_fov(const CameraCatalog& catalog, std::size_t pose_index, const Vec3& pos) {
  if (pose_index >= catalog.poses.size()) {
    throw std::out_of_range("camera pose index " + std::to_string(pose_index) +
                            " out of range (catalog has " +
                            std::to_string(catalog.poses.size()) + " poses)");
  }
  const CameraPose& pose = catalog.poses[pose_index];
  PosedFov out;
  for (int i = 0; i < 5; ++i) out.vertices[i] = pose.vertices[i] + pos;
  out.polytope.halfspaces.reserve(5);
  for (const Plane& pl : pose.faces) {
    out.polytope.halfspaces.push_back(Plane{pl.normal, pl.offset + dot(pl.normal, pos)});
  }
  return out;
}

RayBundle ray_bundle(const std::array<Vec3, 5>& fov_vertices, std::size_t n_rays,
                     std::uint64_t layout_seed, bool jitter) {
  if (n_rays == 0) throw std::invalid_argument("ray bundle needs at least one ray");
  const Vec3& b0 = fov_vertices[0];
  const Vec3 edge_u = fov_vertices[1] - fov_vertices[0];
  const Vec3 edge_v = fov_vertices[3] - fov_vertices[0];
  const Vec3& apex = fov_vertices[4];

  const std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(double(n_rays))));
  const std::size_t rows = (n_rays + cols - 1) / cols;

  std::mt19937_64 rng(layout_seed);
  auto unit = [&rng]() { return double(rng() >> 11) * 0x1.0p-53; };

  RayBundle bundle;
  bundle.rays.reserve(n_rays);
  for (std::size_t k = 0; k < n_rays; ++k) {
    const std::size_t r = k / cols, c = k % cols;
    const double fu = jitter ? unit() : 0.5;
    const double fv = jitter ? unit() : 0.5;
    const double su = (double(c) + fu) / double(cols);
    const double sv = (double(r) + fv) / double(rows);
    bundle.rays.push_back(Ray{b0 + edge_u * su + edge_v * sv, apex});
  }
  return bundle;
}

}  // namespace covplan
