#pragma once

#include <iosfwd>
#include <string>

#include "covplan/geometry.hpp"

namespace covplan {

struct MeshParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ASCII mesh reader for `v x y z` / `f i j k` lines (1-indexed faces,
/// right-hand outward winding). Facet order follows file order. Blank lines
/// and `#` comments are ignored.
TriangleMesh load_mesh(const std::string& path);
TriangleMesh parse_mesh(std::istream& in, const std::string& id);

/// Canonical writer: vertices in first-use order (exact-equality dedup),
/// then faces; %.17g reals. save(load(x)) is a fixed point.
void save_mesh(const TriangleMesh& mesh, const std::string& path);
std::string serialize_mesh(const TriangleMesh& mesh);

}  // namespace covplan
