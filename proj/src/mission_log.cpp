#include "covplan/mission_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace covplan {

namespace {

std::string real9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double round9(double v) { return std::stod(real9(v)); }

const char* outcome_name(MissionOutcome o) {
  switch (o) {
    case MissionOutcome::Complete:
      return "complete";
    case MissionOutcome::MaxSteps:
      return "max_steps";
    case MissionOutcome::Collision:
      return "collision";
  }
  return "unknown";
}

}  // namespace

void write_logs(const MissionState& state, const MissionMetrics& metrics,
                const std::string& scenario_ref, const std::string& dir) {
  {
    std::ofstream out(dir + "/trajectory.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + dir + "/trajectory.csv");
    out << "t,agent,px,py,pz,vx,vy,vz,ux,uy,uz,m_active,theta_deg,phi_deg\n";
    for (const StepLogRow& r : state.trajectory) {
      out << r.t << "," << r.agent << "," << real9(r.state.pos.x) << "," << real9(r.state.pos.y)
          << "," << real9(r.state.pos.z) << "," << real9(r.state.vel.x) << ","
          << real9(r.state.vel.y) << "," << real9(r.state.vel.z) << "," << real9(r.u.force.x)
          << "," << real9(r.u.force.y) << "," << real9(r.u.force.z) << "," << r.m_active << ","
          << real9(r.theta_deg) << "," << real9(r.phi_deg) << "\n";
    }
  }
  {
    std::ofstream out(dir + "/coverage.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + dir + "/coverage.csv");
    out << "point,agent,step\n";
    for (std::size_t p = 0; p < state.covered_by.size(); ++p) {
      out << p << "," << state.covered_by[p] << "," << state.covered_at[p] << "\n";
    }
  }
  {
    std::ofstream out(dir + "/messages.jsonl", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + dir + "/messages.jsonl");
    for (const LoggedMessage& lm : state.messages) {
      nlohmann::ordered_json j;
      j["t"] = lm.t;
      j["from"] = lm.msg.agent;
      j["age"] = lm.msg.age == PlanMessage::Age::Current ? "current" : "previous";
      auto sched = nlohmann::ordered_json::array();
      for (const PlanEntry& e : lm.msg.schedule) {
        sched.push_back({e.point, e.pose, e.tau});
      }
      j["schedule"] = sched;
      j["q"] = lm.q_bits;
      out << j.dump() << "\n";
    }
  }
  {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_ref;
    j["outcome"] = outcome_name(state.outcome);
    if (metrics.completion_step) {
      j["completion_step"] = *metrics.completion_step;
    } else {
      j["completion_step"] = nullptr;
    }
    j["steps"] = metrics.steps;
    auto points = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < metrics.covered_by.size(); ++p) {
      points.push_back({{"point", p},
                        {"agent", metrics.covered_by[p]},
                        {"step", metrics.covered_at[p]}});
    }
    j["points"] = points;
    auto lengths = nlohmann::ordered_json::array();
    for (double v : metrics.path_length) lengths.push_back(round9(v));
    j["path_length"] = lengths;
    j["total_nodes"] = metrics.total_nodes;
    j["warnings"] = state.warnings;
    std::ofstream out(dir + "/metrics.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + dir + "/metrics.json");
    out << j.dump(2) << "\n";
  }
  {
    // wall-clock figures live apart so the main logs stay run-to-run identical
    nlohmann::ordered_json j;
    auto times = nlohmann::ordered_json::array();
    for (double v : metrics.mean_solve_time) times.push_back(v);
    j["mean_solve_time"] = times;
    auto solves = nlohmann::ordered_json::array();
    for (long v : state.solve_count) solves.push_back(v);
    j["solves"] = solves;
    auto nodes = nlohmann::ordered_json::array();
    for (long v : state.node_count) nodes.push_back(v);
    j["nodes"] = nodes;
    std::ofstream out(dir + "/timing.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + dir + "/timing.json");
    out << j.dump(2) << "\n";
  }
}

LoadedLog read_logs(const std::string& dir) {
  LoadedLog log;
  {
    std::ifstream in(dir + "/trajectory.csv");
    if (!in) throw std::runtime_error("cannot open " + dir + "/trajectory.csv");
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      StepLogRow r;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      ss >> r.t >> r.agent >> r.state.pos.x >> r.state.pos.y >> r.state.pos.z >> r.state.vel.x >>
          r.state.vel.y >> r.state.vel.z >> r.u.force.x >> r.u.force.y >> r.u.force.z >>
          r.m_active >> r.theta_deg >> r.phi_deg;
      if (!ss) throw std::runtime_error("malformed trajectory row: " + line);
      log.trajectory.push_back(r);
    }
  }
  {
    std::ifstream in(dir + "/coverage.csv");
    if (!in) throw std::runtime_error("cannot open " + dir + "/coverage.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      int p = 0, agent = 0, step = 0;
      ss >> p >> agent >> step;
      if (!ss) throw std::runtime_error("malformed coverage row: " + line);
      log.covered_by.push_back(agent);
      log.covered_at.push_back(step);
    }
  }
  {
    std::ifstream in(dir + "/metrics.json");
    if (in) {
      nlohmann::json j;
      in >> j;
      log.scenario_ref = j.value("scenario", "");
    }
  }
  return log;
}

}  // namespace covplan
