#include "covplan/visibility.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace covplan {

Aabb Grid::cell_box(int g) const {
  const int gx = divisions[0], gy = divisions[1];
  const int ix = g % gx;
  const int iy = (g / gx) % gy;
  const int iz = g / (gx * gy);
  const Vec3 ext = env_max - env_min;
  auto lo = [&](int i, int d, double mn, double e) { return mn + e * (double(i) / d); };
  Aabb box;
  box.lo = {lo(ix, gx, env_min.x, ext.x), lo(iy, gy, env_min.y, ext.y),
            lo(iz, divisions[2], env_min.z, ext.z)};
  box.hi = {lo(ix + 1, gx, env_min.x, ext.x), lo(iy + 1, gy, env_min.y, ext.y),
            lo(iz + 1, divisions[2], env_min.z, ext.z)};
  return box;
}

Grid build_grid(const Vec3& env_min, const Vec3& env_max, const std::array<int, 3>& divisions) {
  if (!(env_max.x > env_min.x && env_max.y > env_min.y && env_max.z > env_min.z)) {
    throw InvalidBounds("environment box must have positive extent on every axis");
  }
  if (divisions[0] < 1 || divisions[1] < 1 || divisions[2] < 1) {
    throw InvalidBounds("grid divisions must be >= 1");
  }
  return Grid{env_min, env_max, divisions};
}

std::optional<int> cell_of(const Grid& grid, const Vec3& p) {
  int idx[3];
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = grid.env_min[ax], hi = grid.env_max[ax];
    const double v = p[ax];
    if (v < lo || v > hi) return std::nullopt;
    const int d = grid.divisions[ax];
    int i = static_cast<int>(std::floor((v - lo) / (hi - lo) * d));
    if (i >= d) i = d - 1;  // closed top boundary
    if (i < 0) i = 0;
    idx[ax] = i;
  }
  return idx[0] + grid.divisions[0] * (idx[1] + grid.divisions[1] * idx[2]);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t seed, int g) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(g) + 1));
}

}  // namespace

VisibilityMap learn_visibility_map(const Grid& grid, const TriangleMesh& mesh,
                                   const PointsOfInterest& points, const CameraCatalog& catalog,
                                   const SamplingConfig& cfg, int n_rays, int threads) {
  const int cells = grid.cell_count();
  const int np = static_cast<int>(points.size());
  for (const PointOfInterest& p : points) {
    if (p.facet >= mesh.facets.size()) {
      throw MissingHostFacet("point host facet index out of range");
    }
  }

  // facet -> points hosted on it
  std::vector<std::vector<int>> hosted(mesh.facets.size());
  for (int p = 0; p < np; ++p) hosted[points[p].facet].push_back(p);

  VisibilityMap map;
  map.cells = cells;
  map.points = np;
  map.table.assign(static_cast<std::size_t>(cells) * np, 0);
  map.witnesses.assign(static_cast<std::size_t>(cells) * np, std::nullopt);
  map.prov = VisMapProvenance{mesh.id,    grid.env_min,          grid.env_max, grid.divisions,
                              cfg.n_samples, cfg.seed, catalog.hash()};

  auto learn_cell = [&](int g) {
    const Aabb box = grid.cell_box(g);
    std::mt19937_64 rng(cell_seed(cfg.seed, g));
    auto unit = [&rng]() { return double(rng() >> 11) * 0x1.0p-53; };
    for (int s = 0; s < cfg.n_samples; ++s) {
      const Vec3 pos{box.lo.x + unit() * (box.hi.x - box.lo.x),
                     box.lo.y + unit() * (box.hi.y - box.lo.y),
                     box.lo.z + unit() * (box.hi.z - box.lo.z)};
      for (std::size_t m = 0; m < catalog.poses.size(); ++m) {
        const PosedFov fov = pose_fov(catalog, m, pos);
        const RayBundle bundle = ray_bundle(fov.vertices, static_cast<std::size_t>(n_rays));
        for (std::size_t r = 0; r < bundle.rays.size(); ++r) {
          const auto hit = last_hit(bundle.rays[r], mesh);
          if (!hit) continue;
          for (int p : hosted[*hit]) {
            const std::size_t at = static_cast<std::size_t>(g) * np + p;
            if (!map.table[at]) {
              map.table[at] = 1;
              map.witnesses[at] = VisibilityWitness{pos, m, r};
            }
          }
        }
      }
    }
  };

  int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (nthreads < 1) nthreads = 1;
  nthreads = std::min(nthreads, cells);
  if (nthreads <= 1) {
    for (int g = 0; g < cells; ++g) learn_cell(g);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int w = 0; w < nthreads; ++w) {
      pool.emplace_back([&] {
        for (int g = next.fetch_add(1); g < cells; g = next.fetch_add(1)) learn_cell(g);
      });
    }
    for (auto& th : pool) th.join();
  }
  return map;
}

void save_visibility_map(const VisibilityMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[512];
  out << "VISMAP v1\n";
  out << "mesh " << map.prov.mesh_id << "\n";
  std::snprintf(buf, sizeof(buf), "grid %.17g %.17g %.17g %.17g %.17g %.17g %d %d %d\n",
                map.prov.env_min.x, map.prov.env_min.y, map.prov.env_min.z, map.prov.env_max.x,
                map.prov.env_max.y, map.prov.env_max.z, map.prov.divisions[0],
                map.prov.divisions[1], map.prov.divisions[2]);
  out << buf;
  out << "sampling " << map.prov.n_samples << " " << map.prov.seed << "\n";
  std::snprintf(buf, sizeof(buf), "catalog %016llx\n",
                static_cast<unsigned long long>(map.prov.catalog_hash));
  out << buf;
  out << "dims " << map.cells << " " << map.points << "\n";
  std::string row(static_cast<std::size_t>(map.points), '0');
  for (int g = 0; g < map.cells; ++g) {
    for (int p = 0; p < map.points; ++p) {
      row[static_cast<std::size_t>(p)] = map.visible(g, p) ? '1' : '0';
    }
    out << row << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

VisibilityMap load_visibility_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw std::runtime_error(std::string("vismap truncated: ") + what);
    return line;
  };
  if (next_line("header") != "VISMAP v1") throw std::runtime_error("not a VISMAP v1 file");

  VisibilityMap map;
  {
    std::istringstream ss(next_line("mesh"));
    std::string key;
    ss >> key >> map.prov.mesh_id;
    if (key != "mesh") throw std::runtime_error("vismap: expected mesh line");
  }
  {
    std::istringstream ss(next_line("grid"));
    std::string key;
    ss >> key >> map.prov.env_min.x >> map.prov.env_min.y >> map.prov.env_min.z >>
        map.prov.env_max.x >> map.prov.env_max.y >> map.prov.env_max.z >>
        map.prov.divisions[0] >> map.prov.divisions[1] >> map.prov.divisions[2];
    if (key != "grid" || !ss) throw std::runtime_error("vismap: bad grid line");
  }
  {
    std::istringstream ss(next_line("sampling"));
    std::string key;
    ss >> key >> map.prov.n_samples >> map.prov.seed;
    if (key != "sampling" || !ss) throw std::runtime_error("vismap: bad sampling line");
  }
  {
    std::istringstream ss(next_line("catalog"));
    std::string key, hex;
    ss >> key >> hex;
    if (key != "catalog" || !ss) throw std::runtime_error("vismap: bad catalog line");
    map.prov.catalog_hash = std::stoull(hex, nullptr, 16);
  }
  {
    std::istringstream ss(next_line("dims"));
    std::string key;
    ss >> key >> map.cells >> map.points;
    if (key != "dims" || !ss || map.cells < 0 || map.points < 0) {
      throw std::runtime_error("vismap: bad dims line");
    }
  }
  map.table.assign(static_cast<std::size_t>(map.cells) * map.points, 0);
  map.witnesses.assign(map.table.size(), std::nullopt);
  for (int g = 0; g < map.cells; ++g) {
    next_line("table row");
    if (line.size() < static_cast<std::size_t>(map.points)) {
      throw std::runtime_error("vismap: short table row");
    }
    for (int p = 0; p < map.points; ++p) {
      const char c = line[static_cast<std::size_t>(p)];
      if (c != '0' && c != '1') throw std::runtime_error("vismap: bad table character");
      map.table[static_cast<std::size_t>(g) * map.points + p] = (c == '1');
    }
  }
  return map;
}

}  // namespace covplan
