#include "covplan/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace covplan {

namespace {

const char* kPalette[] = {"#2e7d32", "#c62828", "#1565c0", "#6a1b9a",
                          "#ef6c00", "#00838f", "#9e9d24", "#4e342e"};

const char* agent_color(int agent) {
  if (agent < 0) return "#9e9e9e";
  return kPalette[agent % 8];
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

void emit_plot(const LoadedLog& log, const TriangleMesh& mesh, const PointsOfInterest& points,
               const std::string& out_path) {
  // world extent in the xy plane
  double lo_x = 0, lo_y = 0, hi_x = 1, hi_y = 1;
  bool any = false;
  auto grow = [&](double x, double y) {
    if (!any) {
      lo_x = hi_x = x;
      lo_y = hi_y = y;
      any = true;
      return;
    }
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (const Facet& f : mesh.facets) {
    for (const Vec3& v : f.v) grow(v.x, v.y);
  }
  for (const StepLogRow& r : log.trajectory) grow(r.state.pos.x, r.state.pos.y);
  for (const PointOfInterest& p : points) grow(p.p.x, p.p.y);
  const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y) + 1.0;
  lo_x -= pad;
  lo_y -= pad;
  hi_x += pad;
  hi_y += pad;

  const double scale = 720.0 / std::max(hi_x - lo_x, hi_y - lo_y);
  const double width = (hi_x - lo_x) * scale;
  const double height = (hi_y - lo_y) * scale;
  const double strip_h = points.empty() ? 0.0 : 120.0;
  auto sx = [&](double x) { return (x - lo_x) * scale; };
  auto sy = [&](double y) { return height - (y - lo_y) * scale; };  // y up

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height + strip_h) << "\" viewBox=\"0 0 " << num(width) << " "
      << num(height + strip_h) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height + strip_h)
      << "\" fill=\"white\"/>\n";

  out << "<g stroke=\"#b0bec5\" fill=\"#eceff1\" stroke-width=\"0.8\">\n";
  for (const Facet& f : mesh.facets) {
    out << "<polygon points=\"";
    for (const Vec3& v : f.v) out << num(sx(v.x)) << "," << num(sy(v.y)) << " ";
    out << "\"/>\n";
  }
  out << "</g>\n";

  std::map<int, std::vector<const StepLogRow*>> by_agent;
  for (const StepLogRow& r : log.trajectory) by_agent[r.agent].push_back(&r);
  for (const auto& [agent, rows] : by_agent) {
    out << "<polyline fill=\"none\" stroke=\"" << agent_color(agent)
        << "\" stroke-width=\"1.6\" points=\"";
    for (const StepLogRow* r : rows) {
      out << num(sx(r->state.pos.x)) << "," << num(sy(r->state.pos.y)) << " ";
    }
    out << "\"/>\n";
    if (!rows.empty()) {
      out << "<circle cx=\"" << num(sx(rows.front()->state.pos.x)) << "\" cy=\""
          << num(sy(rows.front()->state.pos.y)) << "\" r=\"4\" fill=\"none\" stroke=\""
          << agent_color(agent) << "\"/>\n";
    }
  }

  for (std::size_t p = 0; p < points.size(); ++p) {
    const int agent = p < log.covered_by.size() ? log.covered_by[p] : -1;
    out << "<circle cx=\"" << num(sx(points[p].p.x)) << "\" cy=\"" << num(sy(points[p].p.y))
        << "\" r=\"3.5\" fill=\"" << agent_color(agent) << "\"/>\n";
  }

  if (!points.empty()) {
    int max_step = 1;
    for (int s : log.covered_at) max_step = std::max(max_step, s);
    const double bar_w = width / static_cast<double>(points.size());
    const double base_y = height + strip_h - 14.0;
    out << "<g font-family=\"sans-serif\" font-size=\"9\">\n";
    for (std::size_t p = 0; p < points.size(); ++p) {
      const int step = p < log.covered_at.size() ? log.covered_at[p] : -1;
      const int agent = p < log.covered_by.size() ? log.covered_by[p] : -1;
      const double h = step < 0 ? 4.0 : (strip_h - 30.0) * step / max_step + 4.0;
      out << "<rect x=\"" << num(bar_w * p + 2) << "\" y=\"" << num(base_y - h) << "\" width=\""
          << num(bar_w - 4) << "\" height=\"" << num(h) << "\" fill=\"" << agent_color(agent)
          << "\"/>\n";
      out << "<text x=\"" << num(bar_w * p + bar_w / 2) << "\" y=\"" << num(base_y + 10)
          << "\" text-anchor=\"middle\">" << p << "</text>\n";
    }
    out << "</g>\n";
  }

  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed for " + out_path);
}

}  // namespace covplan
