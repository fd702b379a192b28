#pragma once

#include <cstdint>
#include <vector>

#include "covplan/geometry.hpp"

namespace covplan {

struct DynamicsParams {
  double dt = 1.0;     // sampling interval, s
  double drag = 0.3;   // air drag coefficient, unitless
  double mass = 1.75;  // kg
};

struct AgentState {
  Vec3 pos;  // m
  Vec3 vel;  // m/s
};

struct ControlInput {
  Vec3 force;  // N
};

/// Double integrator with drag:
///   pos' = pos + dt * vel
///   vel' = (1 - drag) * vel + (dt / mass) * force
AgentState step_dynamics(const AgentState& s, const ControlInput& u, const DynamicsParams& p);

struct CameraIntrinsics {
  double base_len = 8.5;  // c_l, m
  double base_wid = 8.5;  // c_w, m
  double range = 10.0;    // c_r, m
};

/// Downward-facing FOV pyramid centered at the origin: 4 base corners at
/// z = -range, apex (optical center) at the origin.
std::array<Vec3, 5> fov_base_vertices(const CameraIntrinsics& intr);

struct CameraPose {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
  std::array<Vec3, 5> vertices;  // origin-centered, 4 base corners then apex
  std::array<Plane, 5> faces;    // origin-relative offsets, 4 sides then base
};

struct CameraCatalog {
  CameraIntrinsics intrinsics;
  std::vector<double> theta_set;  // degrees
  std::vector<double> phi_set;    // degrees
  std::vector<CameraPose> poses;  // row-major over theta x phi
  std::uint64_t hash() const;     // stable digest of the catalog inputs
};

/// Precomputes every (theta, phi) rotation of the origin-centered FOV.
CameraCatalog build_camera_catalog(const CameraIntrinsics& intr,
                                   const std::vector<double>& theta_deg,
                                   const std::vector<double>& phi_deg);

struct PosedFov {
  std::array<Vec3, 5> vertices;
  ConvexPolytope polytope;
};

/// Translates pose m to an agent position: vertices shift by pos, each face
/// offset becomes offset0 + dot(normal, pos). Throws std::out_of_range.
PosedFov pose_fov(const CameraCatalog& catalog, std::size_t pose_index, const Vec3& pos);

struct RayBundle {
  std::vector<Ray> rays;
};

/// Deterministic stratified lattice of ray origins on the posed FOV base; all
/// rays end at the apex. layout_seed only matters in jittered mode.
RayBundle ray_bundle(const std::array<Vec3, 5>& fov_vertices, std::size_t n_rays,
                     std::uint64_t layout_seed = 0, bool jitter = false);

}  // namespace covplan
