#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "covplan/mesh_io.hpp"
#include "covplan/mission.hpp"
#include "covplan/mission_log.hpp"
#include "covplan/scenario.hpp"
#include "covplan/svg_plot.hpp"

namespace {

using namespace covplan;

struct LoadedWorld {
  Scenario scenario;
  CameraCatalog catalog;
  Grid grid;
  VisibilityMap vismap;
};

LoadedWorld load_world(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                       const std::string& vismap_path, bool quiet = false) {
  LoadedWorld w;
  w.scenario = load_scenario(scenario_path);
  if (seed) w.scenario.cfg.seed = *seed;
  const ScenarioConfig& cfg = w.scenario.cfg;
  w.catalog = build_camera_catalog(cfg.camera, cfg.theta_deg, cfg.phi_deg);
  w.grid = build_grid(cfg.env_min, cfg.env_max, cfg.grid_divisions);
  if (!vismap_path.empty() && std::filesystem::exists(vismap_path)) {
    w.vismap = load_visibility_map(vismap_path);
    if (w.vismap.prov.catalog_hash != w.catalog.hash() ||
        w.vismap.prov.divisions != cfg.grid_divisions ||
        w.vismap.prov.n_samples != cfg.n_samples || w.vismap.prov.seed != cfg.seed) {
      throw ValidationError("vismap", "provenance does not match the scenario configuration");
    }
  } else {
    if (!quiet) std::fprintf(stderr, "learning visibility map...\n");
    w.vismap = learn_visibility_map(w.grid, w.scenario.object, w.scenario.points, w.catalog,
                                    SamplingConfig{cfg.n_samples, cfg.seed}, cfg.n_rays);
  }
  return w;
}

std::string schedule_json(const PlanMessage& msg) {
  std::string s = "{\"t\":" + std::to_string(msg.t) + ",\"from\":" + std::to_string(msg.agent) +
                  ",\"schedule\":[";
  for (std::size_t i = 0; i < msg.schedule.size(); ++i) {
    const PlanEntry& e = msg.schedule[i];
    if (i) s += ",";
    s += "[" + std::to_string(e.point) + "," + std::to_string(e.pose) + "," +
         std::to_string(e.tau) + "]";
  }
  s += "]}";
  return s;
}

int run(int argc, char** argv) {
  CLI::App app{"distributed rolling-horizon coverage planner"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, vismap_path, log_dir, mode_override;
  std::optional<std::uint64_t> seed;
  int plan_t = 0;
  int agent_index = 0;

  auto add_seed = [&seed](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "override the scenario seed");
  };

  CLI::App* precompute = app.add_subcommand("precompute", "learn and store the visibility map");
  precompute->add_option("--scenario", scenario_path, "scenario file")->required();
  precompute->add_option("--out", out_path, "output visibility map file")->required();
  add_seed(precompute);

  CLI::App* plan = app.add_subcommand("plan", "run one coordination round and print schedules");
  plan->add_option("--scenario", scenario_path, "scenario file")->required();
  plan->add_option("--t", plan_t, "round time step")->required();
  plan->add_option("--vismap", vismap_path, "precomputed visibility map");
  add_seed(plan);

  CLI::App* simulate = app.add_subcommand("simulate", "run the full mission and write logs");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--out", log_dir, "output log directory")->required();
  simulate->add_option("--mode", mode_override, "comms override: full, range, or none");
  simulate->add_option("--vismap", vismap_path, "precomputed visibility map");
  add_seed(simulate);

  CLI::App* export_milp = app.add_subcommand("export-milp", "export one agent model as MPS");
  export_milp->add_option("--scenario", scenario_path, "scenario file")->required();
  export_milp->add_option("--agent", agent_index, "agent index")->required();
  export_milp->add_option("--out", out_path, "output MPS file")->required();
  export_milp->add_option("--vismap", vismap_path, "precomputed visibility map");
  add_seed(export_milp);

  CLI::App* plot = app.add_subcommand("plot", "render mission logs as an SVG");
  plot->add_option("--log", log_dir, "log directory from simulate")->required();
  plot->add_option("--out", out_path, "output SVG file")->required();
  plot->add_option("--scenario", scenario_path, "scenario file (defaults to the logged one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (precompute->parsed()) {
    LoadedWorld w = load_world(scenario_path, seed, "", true);
    save_visibility_map(w.vismap, out_path);
    std::printf("wrote %s (%d cells x %d points)\n", out_path.c_str(), w.vismap.cells,
                w.vismap.points);
    return 0;
  }

  if (plan->parsed()) {
    LoadedWorld w = load_world(scenario_path, seed, vismap_path);
    const WorldModel world = make_world(w.scenario, w.catalog, w.grid, w.vismap);
    MissionSetup setup = make_setup(w.scenario);

    std::vector<AgentState> states = setup.agents;
    std::vector<CoverageRecord> records(
        states.size(), CoverageRecord{std::vector<std::uint8_t>(w.scenario.points.size(), 0)});
    std::vector<PlanMessage> prev(states.size());
    for (std::size_t n = 0; n < states.size(); ++n) {
      prev[n].agent = static_cast<int>(n);
      prev[n].t = -1;
    }
    if (plan_t > 0) {
      MissionSetup warmup = setup;
      warmup.max_steps = plan_t;
      const MissionState ms = run_mission(world, warmup);
      states = ms.states;
      records = ms.records;
      for (const LoggedMessage& lm : ms.messages) {
        prev[static_cast<std::size_t>(lm.msg.agent)] = lm.msg;
      }
    }
    std::vector<AgentSnapshot> snaps;
    for (std::size_t n = 0; n < states.size(); ++n) {
      snaps.push_back(AgentSnapshot{states[n], records[n], prev[n]});
    }
    CoordinationRound round = exchange_round(plan_t, std::move(snaps), setup.comms);
    std::vector<int> order(states.size());
    for (std::size_t n = 0; n < order.size(); ++n) order[n] = static_cast<int>(n);
    if (!setup.agent_order.empty()) order = setup.agent_order;
    for (int n : order) {
      const Inbox inbox = round.inbox_for(n);
      const PlanStepResult res = plan_step(n, states[static_cast<std::size_t>(n)],
                                           records[static_cast<std::size_t>(n)], inbox, world,
                                           plan_t, 0);
      round.record_plan(res.message);
      std::printf("%s\n", schedule_json(res.message).c_str());
    }
    return 0;
  }

  if (simulate->parsed()) {
    LoadedWorld w = load_world(scenario_path, seed, vismap_path);
    if (!mode_override.empty()) {
      if (mode_override == "full") w.scenario.cfg.comms.mode = CommsModel::Mode::Full;
      else if (mode_override == "range") w.scenario.cfg.comms.mode = CommsModel::Mode::Range;
      else if (mode_override == "none") w.scenario.cfg.comms.mode = CommsModel::Mode::None;
      else throw ValidationError("--mode", "must be full, range, or none");
    }
    std::filesystem::create_directories(log_dir);
    WorldModel world = make_world(w.scenario, w.catalog, w.grid, w.vismap);
    world.debug_dir = log_dir;
    const MissionSetup setup = make_setup(w.scenario);
    const MissionState ms = run_mission(world, setup);
    const MissionMetrics metrics = compute_metrics(ms);
    write_logs(ms, metrics, scenario_path, log_dir);
    if (metrics.completion_step) {
      std::printf("mission complete at step %d; logs in %s\n", *metrics.completion_step,
                  log_dir.c_str());
    } else {
      std::printf("mission ended (%s) after %d steps; logs in %s\n",
                  ms.outcome == MissionOutcome::Collision ? "collision" : "max steps reached",
                  ms.t, log_dir.c_str());
    }
    return ms.outcome == MissionOutcome::Complete ? 0 : 3;
  }

  if (export_milp->parsed()) {
    LoadedWorld w = load_world(scenario_path, seed, vismap_path);
    const WorldModel world = make_world(w.scenario, w.catalog, w.grid, w.vismap);
    const MissionSetup setup = make_setup(w.scenario);
    if (agent_index < 0 || agent_index >= static_cast<int>(setup.agents.size())) {
      throw ValidationError("--agent", "agent index out of range");
    }
    std::vector<CoverageRecord> records(
        setup.agents.size(),
        CoverageRecord{std::vector<std::uint8_t>(w.scenario.points.size(), 0)});
    std::vector<AgentSnapshot> snaps;
    for (std::size_t n = 0; n < setup.agents.size(); ++n) {
      PlanMessage empty;
      empty.agent = static_cast<int>(n);
      empty.t = -1;
      snaps.push_back(AgentSnapshot{setup.agents[n], records[n], empty});
    }
    CoordinationRound round = exchange_round(0, std::move(snaps), setup.comms);
    for (int n = 0; n < agent_index; ++n) {
      const Inbox inbox = round.inbox_for(n);
      const PlanStepResult res =
          plan_step(n, setup.agents[static_cast<std::size_t>(n)],
                    records[static_cast<std::size_t>(n)], inbox, world, 0, 0);
      round.record_plan(res.message);
    }
    const Inbox inbox = round.inbox_for(agent_index);
    HorizonContext ctx =
        make_horizon_context(agent_index, setup.agents[static_cast<std::size_t>(agent_index)],
                             records[static_cast<std::size_t>(agent_index)], inbox, world, 0);
    const BuiltModel built = build_agent_model(ctx);
    export_mps(built.model, out_path);
    std::printf("wrote %s (%zu variables, %d binaries, %zu rows)\n", out_path.c_str(),
                built.model.vars.size(), built.model.binary_count(), built.model.cons.size());
    return 0;
  }

  if (plot->parsed()) {
    const LoadedLog log = read_logs(log_dir);
    const std::string sc_path = scenario_path.empty() ? log.scenario_ref : scenario_path;
    if (sc_path.empty()) throw ValidationError("--scenario", "no scenario available for the mesh");
    const Scenario sc = load_scenario(sc_path);
    emit_plot(log, sc.object, sc.points, out_path);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const SolverFailure& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const MeshParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
