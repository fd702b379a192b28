#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covplan/geometry.hpp"
#include "covplan/vehicle.hpp"

namespace covplan {

struct InvalidBounds : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingHostFacet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform axis-aligned decomposition of the environment box. Cell g covers
/// the half-open box at index (ix, iy, iz) with g = ix + gx*(iy + gy*iz).
struct Grid {
  Vec3 env_min, env_max;
  std::array<int, 3> divisions{1, 1, 1};

  int cell_count() const { return divisions[0] * divisions[1] * divisions[2]; }
  Aabb cell_box(int g) const;
};

Grid build_grid(const Vec3& env_min, const Vec3& env_max, const std::array<int, 3>& divisions);

/// Cell containing p under half-open semantics; the upper environment
/// boundary is closed. Empty when p is outside the environment box.
std::optional<int> cell_of(const Grid& grid, const Vec3& p);

struct SamplingConfig {
  int n_samples = 100;
  std::uint64_t seed = 0;
};

struct PointOfInterest {
  Vec3 p;
  std::size_t facet = 0;  // host facet index in the object mesh
};
using PointsOfInterest = std::vector<PointOfInterest>;

struct VisMapProvenance {
  std::string mesh_id;
  Vec3 env_min, env_max;
  std::array<int, 3> divisions{1, 1, 1};
  int n_samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t catalog_hash = 0;
};

struct VisibilityWitness {
  Vec3 position;
  std::size_t pose = 0;
  std::size_t ray = 0;
};

struct VisibilityMap {
  int cells = 0;
  int points = 0;
  std::vector<std::uint8_t> table;  // row-major [cell * points + point]
  VisMapProvenance prov;
  // First sample that proved each entry; in-memory only, not serialized.
  std::vector<std::optional<VisibilityWitness>> witnesses;

  bool visible(int g, int p) const {
    return table[static_cast<std::size_t>(g) * points + p] != 0;
  }
};

/// Offline visibility learning: per cell, N_s positions are sampled from a
/// per-cell generator seeded by hash(seed, g); every catalog pose is swept at
/// each sample and v[g][p] is set when some ray's last hit is p's host facet.
/// threads = 0 picks hardware concurrency; the result is identical for any
/// thread count.
VisibilityMap learn_visibility_map(const Grid& grid, const TriangleMesh& mesh,
                                   const PointsOfInterest& points, const CameraCatalog& catalog,
                                   const SamplingConfig& cfg, int n_rays = 50, int threads = 0);

// VISMAP v1 text format; bit-exact across platforms.
void save_visibility_map(const VisibilityMap& map, const std::string& path);
VisibilityMap load_visibility_map(const std::string& path);

}  // namespace covplan
