#pragma once

#include <string>
#include <vector>

#include "covplan/mission_log.hpp"

namespace covplan {

/// Single-SVG mission summary: top-down mesh outline, per-agent trajectory
/// polylines, points colored by covering agent, and a per-point cover-step
/// bar strip underneath.
void emit_plot(const LoadedLog& log, const TriangleMesh& mesh, const PointsOfInterest& points,
               const std::string& out_path);

}  // namespace covplan
