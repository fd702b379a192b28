#include "covplan/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace covplan {

TriangleMesh parse_mesh(std::istream& in, const std::string& id) {
  std::vector<Vec3> vertices;
  TriangleMesh mesh;
  mesh.id = id;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x >> v.y >> v.z)) {
        throw MeshParseError(id + ":" + std::to_string(lineno) + ": malformed vertex line");
      }
      vertices.push_back(v);
    } else if (tag == "f") {
      long a = 0, b = 0, c = 0;
      if (!(ss >> a >> b >> c)) {
        throw MeshParseError(id + ":" + std::to_string(lineno) + ": malformed face line");
      }
      const long nv = static_cast<long>(vertices.size());
      for (long idx : {a, b, c}) {
        if (idx < 1 || idx > nv) {
          throw MeshParseError(id + ":" + std::to_string(lineno) + ": vertex index " +
                               std::to_string(idx) + " out of range (have " +
                               std::to_string(nv) + " vertices)");
        }
      }
      mesh.facets.push_back(Facet{{vertices[static_cast<std::size_t>(a - 1)],
                                   vertices[static_cast<std::size_t>(b - 1)],
                                   vertices[static_cast<std::size_t>(c - 1)]}});
    } else {
      throw MeshParseError(id + ":" + std::to_string(lineno) + ": unsupported line tag '" + tag +
                           "'");
    }
  }
  return mesh;
}

TriangleMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshParseError("cannot open mesh file " + path);
  std::string id = path;
  const auto slash = id.find_last_of('/');
  if (slash != std::string::npos) id = id.substr(slash + 1);
  return parse_mesh(in, id);
}

namespace {

struct VecLess {
  bool operator()(const Vec3& a, const Vec3& b) const {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  }
};

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_mesh(const TriangleMesh& mesh) {
  std::map<Vec3, int, VecLess> seen;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  for (const Facet& f : mesh.facets) {
    std::array<int, 3> face{};
    for (int i = 0; i < 3; ++i) {
      const auto it = seen.find(f.v[static_cast<std::size_t>(i)]);
      if (it == seen.end()) {
        const int id = static_cast<int>(vertices.size());
        vertices.push_back(f.v[static_cast<std::size_t>(i)]);
        seen.emplace(f.v[static_cast<std::size_t>(i)], id);
        face[static_cast<std::size_t>(i)] = id;
      } else {
        face[static_cast<std::size_t>(i)] = it->second;
      }
    }
    faces.push_back(face);
  }
  std::ostringstream out;
  for (const Vec3& v : vertices) {
    out << "v " << real(v.x) << " " << real(v.y) << " " << real(v.z) << "\n";
  }
  for (const auto& f : faces) {
    out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
  }
  return out.str();
}

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << serialize_mesh(mesh);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace covplan
