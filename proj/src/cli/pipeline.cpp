#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include "specscen/pipeline.hpp"
#include "specscen/relations.hpp"
#include "specscen/rg_generation.hpp"
#include "specscen/seeds.hpp"
#include "specscen/waypoint_graph.hpp"

namespace specscen::cli {

using nlohmann::json;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void reset_dir(const fs::path& p) {
  fs::remove_all(p);
  fs::create_directories(p);
}

rg::NodeBudget budget_of(const RunConfig& cfg) {
  rg::NodeBudget b;
  for (const auto& [type, n] : cfg.budgets) b.set(type, n);
  return b;
}

std::string stage(const std::string& kind, const std::string& spec, const std::string& item) {
  return kind + "/" + spec + "/" + item;
}

sim::ScenarioScript base_script(const RunConfig& cfg, const std::string& spec) {
  sim::ScenarioScript s;
  s.spec = spec;
  s.world_file = "../world.json";
  s.speed_law = cfg.speed_law;
  s.duration = cfg.duration;
  s.rate = cfg.rate;
  return s;
}

}  // namespace

void Outcome::merge(Outcome o) {
  failures += o.failures;
  for (auto& m : o.messages) messages.push_back(std::move(m));
  for (auto& r : o.reports) reports.push_back(std::move(r));
}

std::set<std::size_t> SpecPlan::feasible_configurations() const {
  std::set<std::size_t> out;
  for (const auto& r : rgs)
    if (r.feasible) out.insert(r.sources.begin(), r.sources.end());
  return out;
}

std::size_t SpecPlan::feasible_rgs() const {
  return static_cast<std::size_t>(std::count_if(rgs.begin(), rgs.end(), [](const RgRecord& r) { return r.feasible; }));
}

world::RoadWorld make_world(const RunConfig& cfg) {
  return cfg.world_file ? world::load_world(*cfg.world_file) : world::build_grid_world(cfg.grid);
}

fs::path spec_dir(const RunConfig& cfg, const std::string& spec_name) { return cfg.out / spec_name; }

fs::path baseline_dir(const RunConfig& cfg, const std::string& spec_name) {
  return spec_dir(cfg, spec_name) / ("baseline-x" + std::to_string(cfg.multiplier));
}

sim::Route route_for(const world::WaypointGraph& wg, const std::vector<int>& waypoints) {
  sim::Route r;
  for (int w : waypoints) {
    r.points.push_back(wg.node(w).position);
    r.lanes.push_back(wg.node(w).lane);
  }
  return r;
}

SpecPlan plan_spec(const spec::Spec& sp, const RunConfig& cfg, const world::RoadWorld& world) {
  SpecPlan plan;
  plan.spec = sp;
  plan.cs = spec::enumerate_configurations(spec::normalize(sp.precondition), sp.aps);
  std::vector<spec::Formula> cases;
  for (const auto& c : plan.cs.configurations) cases.push_back(c.formula);
  auto result = rg::generate_rgs(cases, plan.cs.aps, budget_of(cfg));
  plan.diagnostics = result.diagnostics;
  for (std::size_t i = 0; i < result.graphs.size(); ++i) {
    RgRecord rec;
    rec.id = "rg" + std::to_string(i);
    rec.graph = result.graphs[i].graph;
    rec.sources = result.graphs[i].sources;
    const auto sigma = scene::map_rg_to_constraints(rec.graph);
    try {
      rec.witness = scene::sample_initial_scene(sigma, world, derive_seed(cfg.seed, stage("scene", sp.name, rec.id), 0),
                                                cfg.sampler);
      rec.feasible = true;
    } catch (const scene::Unsatisfiable&) {
      rec.feasible = false;
    }
    plan.rgs.push_back(std::move(rec));
  }
  return plan;
}

namespace {

json index_json(const SpecPlan& plan) {
  json j;
  j["spec"] = plan.spec.name;
  j["configurations"] = json::array();
  for (const auto& c : plan.cs.configurations)
    j["configurations"].push_back({{"id", c.id}, {"label", c.label}, {"formula", spec::to_string(c.formula)}});
  j["rgs"] = json::array();
  for (const auto& r : plan.rgs)
    j["rgs"].push_back({{"id", r.id}, {"file", r.id + ".rg"}, {"sources", r.sources}, {"feasible", r.feasible}});
  j["diagnostics"] = plan.diagnostics;
  return j;
}

constexpr int kSceneAttempts = 8;

Outcome generate_spec(const spec::Spec& sp, const RunConfig& cfg, const world::RoadWorld& world,
                      const world::WaypointGraph& wg) {
  Outcome out;
  const fs::path dir = spec_dir(cfg, sp.name);
  for (const char* sub : {"rgs", "scenes", "scripts"}) reset_dir(dir / sub);
  world::save_world(world, dir / "world.json");

  SpecPlan plan = plan_spec(sp, cfg, world);
  write_file(dir / "rgs" / "index.json", index_json(plan).dump(2) + "\n");
  for (const auto& d : plan.diagnostics) out.messages.push_back(sp.name + ": " + d);

  for (const auto& rec : plan.rgs) {
    write_file(dir / "rgs" / (rec.id + ".rg"), rec.graph.serialize());
    if (!rec.feasible) {
      out.messages.push_back(sp.name + "/" + rec.id + ": infeasible on this map (sampler found no scene)");
      continue;
    }
    const auto sigma = scene::map_rg_to_constraints(rec.graph);
    for (int s = 0; s < cfg.scenes_per_rg; ++s) {
      const std::string scene_id = rec.id + "_s" + std::to_string(s);
      try {
        // A scene whose entities cannot all be routed is replaced by a fresh
        // sample, so every feasible RG still yields its full set of scripts.
        std::uint64_t scene_seed = 0;
        std::uint64_t ep_seed = 0;
        std::optional<scene::Scene> sc;
        std::vector<path::EndpointBinding> bindings;
        std::map<std::string, std::vector<path::Trajectory>> paths;
        for (int attempt = 0;; ++attempt) {
          try {
            scene_seed = attempt == 0 ? derive_seed(cfg.seed, stage("scene", sp.name, rec.id), s)
                                      : derive_seed(cfg.seed, stage("scene-retry", sp.name, scene_id), attempt);
            sc = s == 0 && attempt == 0 ? *rec.witness : scene::sample_initial_scene(sigma, world, scene_seed, cfg.sampler);
            ep_seed = derive_seed(cfg.seed, stage("endpoints", sp.name, scene_id), attempt);
            bindings = path::bind_endpoints(rec.graph, *sc, wg, world, cfg.endpoints, ep_seed);
            paths.clear();
            for (const auto& b : bindings) {
              auto cands = path::k_shortest_paths(wg, b.start, b.goal, cfg.k);
              paths[b.entity] = path::select_diverse(cands, static_cast<std::size_t>(cfg.paths_per_scene));
            }
            if (attempt > 0)
              out.messages.push_back(sp.name + "/" + scene_id + ": resampled " + std::to_string(attempt) + "x before routing succeeded");
            break;
          } catch (const std::exception&) {
            if (attempt + 1 >= kSceneAttempts) throw;
          }
        }
        write_file(dir / "scenes" / (scene_id + ".json"), sc->to_json().dump(1) + "\n");
        for (int p = 0; p < cfg.paths_per_scene; ++p) {
          sim::ScenarioScript script = base_script(cfg, sp.name);
          script.rg_id = rec.id;
          script.configurations = rec.sources;
          script.scene = *sc;
          script.seed = derive_seed(cfg.seed, stage("script", sp.name, scene_id), p);
          script.seed_chain = {{"master", cfg.seed}, {"scene", scene_seed}, {"endpoints", ep_seed}};
          for (const auto& b : bindings) {
            const auto& options = paths.at(b.entity);
            const auto& t = options[std::min<std::size_t>(p, options.size() - 1)];
            script.trajectories.push_back({b.entity, t.waypoints, route_for(wg, t.waypoints)});
          }
          sim::save_script(script, dir / "scripts" / (scene_id + "_p" + std::to_string(p) + ".json"));
        }
      } catch (const std::exception& e) {
        ++out.failures;
        out.messages.push_back(sp.name + "/" + scene_id + ": " + e.what());
      }
    }
  }
  out.messages.push_back(sp.name + ": " + std::to_string(plan.rgs.size()) + " RGs, " +
                         std::to_string(plan.feasible_rgs()) + " feasible");
  return out;
}

std::vector<spec::Spec> load_specs(const RunConfig& cfg) {
  std::vector<spec::Spec> out;
  for (const auto& p : cfg.specs) {
    try {
      out.push_back(spec::load_spec_file(p));
    } catch (const std::exception& e) {
      throw ConfigError(p.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

Outcome cmd_generate(const RunConfig& cfg) {
  cfg.validate();
  const auto world = make_world(cfg);
  const auto wg = world::build_waypoint_graph(world, cfg.spacing);
  Outcome out;
  for (const auto& sp : load_specs(cfg)) {
    try {
      out.merge(generate_spec(sp, cfg, world, wg));
    } catch (const std::exception& e) {
      ++out.failures;
      out.messages.push_back(sp.name + ": " + e.what());
    }
  }
  return out;
}

Outcome cmd_simulate_scripts(const std::vector<fs::path>& scripts, const std::string& agent, int jobs) {
  Outcome out;
  if (scripts.empty()) return out;
  if (!sim::builtin_agents().count(agent)) throw ConfigError("unknown agent: " + agent);

  std::vector<sim::ScenarioScript> loaded;
  std::vector<fs::path> paths;
  std::vector<std::string> world_keys;
  std::map<std::string, world::RoadWorld> worlds;
  for (const auto& p : scripts) {
    try {
      auto s = sim::load_script(p);
      const fs::path wf = fs::weakly_canonical(p.parent_path() / s.world_file);
      if (!worlds.count(wf.string())) worlds.emplace(wf.string(), world::load_world(wf));
      world_keys.push_back(wf.string());
      loaded.push_back(std::move(s));
      paths.push_back(p);
    } catch (const std::exception& e) {
      ++out.failures;
      out.messages.push_back(p.string() + ": " + e.what());
    }
  }
  std::vector<sim::BatchJob> batch;
  for (std::size_t i = 0; i < loaded.size(); ++i) batch.push_back({&loaded[i], &worlds.at(world_keys[i])});

  std::vector<sim::Trace> traces;
  try {
    traces = sim::run_batch(batch, agent, jobs);
  } catch (const std::exception& e) {
    // Fall back to one run at a time so a single bad script does not hide the rest.
    traces.clear();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      try {
        traces.push_back(sim::run_batch_serial(std::span(&batch[i], 1), agent).front());
      } catch (const std::exception& e2) {
        sim::Trace t;
        t.meta.aborted = true;
        t.meta.error = e2.what();
        traces.push_back(std::move(t));
      }
    }
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    auto& t = traces[i];
    t.meta.script = paths[i].stem().string();
    if (t.meta.aborted) {
      ++out.failures;
      out.messages.push_back(paths[i].string() + ": run aborted: " + t.meta.error);
    }
    if (t.frames.empty()) continue;
    sim::save_trace(t, paths[i].parent_path().parent_path() / "traces" / (paths[i].stem().string() + ".ndjson"));
  }
  return out;
}

Outcome cmd_simulate(const RunConfig& cfg) {
  cfg.validate();
  Outcome out;
  for (const auto& sp : load_specs(cfg)) {
    const fs::path dir = spec_dir(cfg, sp.name);
    reset_dir(dir / "traces");
    out.merge(cmd_simulate_scripts(files_with_extension(dir / "scripts", ".json"), cfg.agent, cfg.jobs));
  }
  return out;
}

namespace {

struct Feasibility {
  std::set<std::size_t> configs;
  std::optional<std::size_t> rg_feasible;
  std::optional<std::size_t> rg_total;
};

Feasibility read_feasibility(const fs::path& index, const spec::ConfigurationSpace& cs) {
  Feasibility f;
  if (!fs::exists(index)) {
    for (const auto& c : cs.configurations) f.configs.insert(c.id);
    return f;
  }
  const json j = json::parse(read_file(index));
  std::size_t feasible = 0;
  for (const auto& r : j.at("rgs")) {
    if (!r.at("feasible").get<bool>()) continue;
    ++feasible;
    for (const auto& s : r.at("sources")) f.configs.insert(s.get<std::size_t>());
  }
  f.rg_feasible = feasible;
  f.rg_total = j.at("rgs").size();
  return f;
}

Outcome evaluate_into(const spec::Spec& sp, const RunConfig& cfg, const Feasibility& feas,
                      const std::vector<fs::path>& trace_files, const fs::path& report_dir) {
  Outcome out;
  const auto cs = spec::enumerate_configurations(spec::normalize(sp.precondition), sp.aps);
  std::vector<sim::Trace> traces;
  for (const auto& p : trace_files) {
    try {
      auto t = sim::load_trace(p);
      if (t.meta.spec != sp.name) throw std::runtime_error("trace belongs to spec '" + t.meta.spec + "'");
      traces.push_back(std::move(t));
    } catch (const std::exception& e) {
      ++out.failures;
      out.messages.push_back(p.string() + ": " + e.what());
    }
  }
  auto report = eval::compute_coverage(sp, cs, feas.configs, traces);
  report.agent = traces.empty() ? cfg.agent : traces.front().meta.agent;
  report.rg_feasible = feas.rg_feasible;
  report.rg_total = feas.rg_total;
  for (const auto& w : report.warnings) out.messages.push_back(sp.name + ": warning: " + w);

  std::set<std::size_t> counted = report.feasible;
  counted.insert(report.covered.begin(), report.covered.end());
  const auto ev = eval::evaluate_traces(traces, cs);
  std::vector<spec::Formula> configs;
  for (const auto& c : cs.configurations) configs.push_back(c.formula);
  const auto curve = eval::coverage_curve(eval::satisfaction_matrix(configs, ev.values, ev.lengths), counted,
                                          report.cov1_denominator(), cfg.permutations,
                                          derive_seed(cfg.seed, stage("curve", sp.name, report_dir.parent_path().filename().string())));

  write_file(report_dir / "coverage.json", eval::dump_report({report}));
  write_file(report_dir / "coverage.txt", eval::format_table({report}));
  write_file(report_dir / "curve.csv", eval::curve_csv(curve));
  out.reports.push_back(std::move(report));
  return out;
}

}  // namespace

Outcome cmd_evaluate(const RunConfig& cfg, const std::vector<fs::path>& trace_files) {
  cfg.validate();
  Outcome out;
  const auto specs = load_specs(cfg);
  std::map<std::string, std::vector<fs::path>> by_spec;
  if (!trace_files.empty()) {
    for (const auto& p : trace_files) {
      try {
        by_spec[sim::load_trace(p).meta.spec].push_back(p);
      } catch (const std::exception& e) {
        ++out.failures;
        out.messages.push_back(p.string() + ": " + e.what());
      }
    }
    for (const auto& [name, files] : by_spec) {
      const bool known = std::any_of(specs.begin(), specs.end(), [&](const spec::Spec& s) { return s.name == name; });
      if (!known) {
        out.failures += static_cast<int>(files.size());
        out.messages.push_back("traces for unknown spec '" + name + "'");
      }
    }
  }
  for (const auto& sp : specs) {
    const fs::path dir = spec_dir(cfg, sp.name);
    const auto cs = spec::enumerate_configurations(spec::normalize(sp.precondition), sp.aps);
    const auto feas = read_feasibility(dir / "rgs" / "index.json", cs);
    const auto files = trace_files.empty() ? files_with_extension(dir / "traces", ".ndjson") : by_spec[sp.name];
    out.merge(evaluate_into(sp, cfg, feas, files, dir / "reports"));
  }
  return out;
}

Outcome cmd_run_all(const RunConfig& cfg) {
  Outcome out = cmd_generate(cfg);
  out.merge(cmd_simulate(cfg));
  out.merge(cmd_evaluate(cfg));
  return out;
}

namespace {

// Uniform lane, uniform station away from the lane ends.
std::optional<world::EntityState> random_pose(const world::RoadWorld& world, const std::vector<int>& lanes, Rng& rng,
                                              const std::string& id, const std::string& type) {
  const auto& lane = world.lane(lanes[rng.index(lanes.size())]);
  const double margin = 6.0;
  const double len = lane.centerline.length();
  if (len <= 2 * margin) return std::nullopt;
  const double st = rng.uniform(margin, len - margin);
  world::EntityState s;
  s.id = id;
  s.type = type;
  s.pose.position = {world::quantize(lane.centerline.point_at(st).x), world::quantize(lane.centerline.point_at(st).y)};
  s.pose.heading = world::quantize(lane.centerline.heading_at(st));
  return s;
}

// Random forward walk over follow edges until the target length is reached.
std::vector<int> random_walk(const world::WaypointGraph& wg, int start, double target, Rng& rng) {
  std::vector<int> walk{start};
  std::set<int> seen{start};
  double len = 0.0;
  while (len < target) {
    std::vector<const world::WaypointEdge*> next;
    for (int e : wg.out_edges(walk.back())) {
      const auto& edge = wg.edges()[static_cast<std::size_t>(e)];
      if (edge.kind == world::EdgeKind::Follow && !seen.count(edge.dst)) next.push_back(&edge);
    }
    if (next.empty()) break;
    const auto* pick = next[rng.index(next.size())];
    walk.push_back(pick->dst);
    seen.insert(pick->dst);
    len += pick->length;
  }
  return walk;
}

}  // namespace

Outcome cmd_baseline_random(const RunConfig& cfg) {
  cfg.validate();
  const auto world = make_world(cfg);
  const auto wg = world::build_waypoint_graph(world, cfg.spacing);
  std::vector<int> road_lanes;
  for (const auto& l : world.lanes())
    if (!l.is_connector()) road_lanes.push_back(l.id);
  if (road_lanes.empty()) throw ConfigError("world has no road lanes");

  Outcome out;
  for (const auto& sp : load_specs(cfg)) {
    const fs::path dir = baseline_dir(cfg, sp.name);
    for (const char* sub : {"scripts", "traces", "reports"}) reset_dir(dir / sub);
    world::save_world(world, dir / "world.json");
    const SpecPlan plan = plan_spec(sp, cfg, world);

    for (const auto& rec : plan.rgs) {
      if (!rec.feasible) continue;
      std::vector<std::string> npc_types;
      for (const auto& n : rec.graph.nodes())
        if (n.type != world::kEgoType && world::is_vehicle_type(n.type))
          for (int m = 0; m < cfg.multiplier; ++m) npc_types.push_back(n.type);

      const int runs = cfg.scenes_per_rg * cfg.paths_per_scene;
      for (int r = 0; r < runs; ++r) {
        const std::string name = rec.id + "_r" + std::to_string(r);
        const std::uint64_t seed = derive_seed(cfg.seed, stage("baseline", sp.name, name), cfg.multiplier);
        Rng rng(seed);
        try {
          std::vector<world::EntityState> states;
          auto place = [&](const std::string& id, const std::string& type) {
            for (int attempt = 0; attempt < cfg.sampler.max_tries; ++attempt) {
              auto s = random_pose(world, road_lanes, rng, id, type);
              if (!s) continue;
              const auto cs = world::footprint_corners(s->pose, world::footprint_for(type));
              bool clash = false;
              for (const auto& o : states)
                clash = clash || world::rectangles_overlap(cs, world::footprint_corners(o.pose, world::footprint_for(o.type)));
              if (clash) continue;
              s->speed = type == world::kEgoType ? 0.0 : cfg.sampler.npc_speed;
              states.push_back(*s);
              return;
            }
            throw std::runtime_error("spawn collision after " + std::to_string(cfg.sampler.max_tries) + " tries");
          };
          place(std::string(world::kEgoType), std::string(world::kEgoType));
          for (std::size_t i = 0; i < npc_types.size(); ++i) place("npc" + std::to_string(i + 1), npc_types[i]);

          sim::ScenarioScript script = base_script(cfg, sp.name);
          script.rg_id = "baseline";
          script.scene.states = states;
          script.scene.seed = seed;
          script.seed = seed;
          script.seed_chain = {{"master", cfg.seed}, {"baseline", seed}};
          for (const auto& s : states) {
            const int start = wg.nearest(s.pose.position, s.pose.heading);
            const double target = rng.uniform(cfg.endpoints.r0, cfg.endpoints.r_max);
            auto walk = random_walk(wg, start, target, rng);
            script.trajectories.push_back({s.id, walk, route_for(wg, walk)});
          }
          sim::save_script(script, dir / "scripts" / (name + ".json"));
        } catch (const std::exception& e) {
          ++out.failures;
          out.messages.push_back(sp.name + "/baseline/" + name + ": " + e.what());
        }
      }
    }
    out.merge(cmd_simulate_scripts(files_with_extension(dir / "scripts", ".json"), cfg.agent, cfg.jobs));
    Feasibility feas;
    feas.configs = plan.feasible_configurations();
    feas.rg_feasible = plan.feasible_rgs();
    feas.rg_total = plan.rgs.size();
    out.merge(evaluate_into(sp, cfg, feas, files_with_extension(dir / "traces", ".ndjson"), dir / "reports"));
  }
  return out;
}

}  // namespace specscen::cli
