#include <fstream>

#include "specscen/pipeline.hpp"

namespace specscen::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
void read(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
  if (specs.empty()) throw ConfigError("config lists no spec files");
  for (const auto& s : specs)
    if (!fs::exists(s)) throw ConfigError("spec file not found: " + s.string());
  if (world_file && !fs::exists(*world_file)) throw ConfigError("world file not found: " + world_file->string());
  if (scenes_per_rg < 1 || paths_per_scene < 1) throw ConfigError("scenes_per_rg and paths_per_scene must be >= 1");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (permutations < 1) throw ConfigError("permutations must be >= 1");
  if (multiplier != 1 && multiplier != 10) throw ConfigError("multiplier must be 1 or 10");
  if (!(spacing > 0)) throw ConfigError("spacing must be positive");
  if (!(duration > 0) || !(rate > 0)) throw ConfigError("duration and rate must be positive");
  if (sampler.max_tries < 1) throw ConfigError("sampler.max_tries must be >= 1");
  if (!(endpoints.r0 > 0) || endpoints.r_max < endpoints.r0 || !(endpoints.r_step > 0) ||
      endpoints.draws_per_radius < 1)
    throw ConfigError("invalid endpoint radii");
  for (const auto& [type, n] : budgets)
    if (n < 1) throw ConfigError("budget for " + type + " must be >= 1");
  try {
    speed_law.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("speed_law: ") + e.what());
  }
  if (!sim::builtin_agents().count(agent)) throw ConfigError("unknown agent: " + agent);
}

json RunConfig::to_json() const {
  json j;
  j["specs"] = json::array();
  for (const auto& s : specs) j["specs"].push_back(s.generic_string());
  if (world_file) {
    j["world"] = {{"file", world_file->generic_string()}};
  } else {
    j["world"] = {{"grid",
                   {{"blocks_x", grid.blocks_x},
                    {"blocks_y", grid.blocks_y},
                    {"lane_length", grid.lane_length},
                    {"lanes_per_road", grid.lanes_per_road},
                    {"control", world::to_string(grid.control)},
                    {"lane_width", grid.lane_width}}}};
  }
  j["budgets"] = budgets;
  j["scenes_per_rg"] = scenes_per_rg;
  j["paths_per_scene"] = paths_per_scene;
  j["agent"] = agent;
  j["speed_law"] = {{"v0", speed_law.v0},       {"alpha", speed_law.alpha}, {"beta", speed_law.beta},
                    {"v_min", speed_law.v_min}, {"v_max", speed_law.v_max}, {"printed_sign", speed_law.printed_sign}};
  j["duration"] = duration;
  j["rate"] = rate;
  j["seed"] = seed;
  j["out"] = out.generic_string();
  j["k"] = k;
  j["spacing"] = spacing;
  j["permutations"] = permutations;
  j["jobs"] = jobs;
  j["multiplier"] = multiplier;
  j["endpoints"] = {{"r0", endpoints.r0},
                    {"r_step", endpoints.r_step},
                    {"r_max", endpoints.r_max},
                    {"draws_per_radius", endpoints.draws_per_radius}};
  j["sampler"] = {{"max_tries", sampler.max_tries}, {"npc_speed", sampler.npc_speed}};
  return j;
}

RunConfig RunConfig::from_json(const json& j, const fs::path& base) {
  RunConfig c;
  try {
    check_keys(j,
               {"specs", "world", "budgets", "scenes_per_rg", "paths_per_scene", "agent", "speed_law", "duration",
                "rate", "seed", "out", "k", "spacing", "permutations", "jobs", "multiplier", "endpoints", "sampler"},
               "config");
    for (const auto& s : j.at("specs")) c.specs.push_back(resolve(base, s.get<std::string>()));
    if (j.contains("world")) {
      const json& w = j.at("world");
      check_keys(w, {"grid", "file"}, "world");
      if (w.contains("file")) c.world_file = resolve(base, w.at("file").get<std::string>());
      if (w.contains("grid")) {
        const json& g = w.at("grid");
        check_keys(g, {"blocks_x", "blocks_y", "lane_length", "lanes_per_road", "control", "lane_width"}, "grid");
        read(g, "blocks_x", c.grid.blocks_x);
        read(g, "blocks_y", c.grid.blocks_y);
        read(g, "lane_length", c.grid.lane_length);
        read(g, "lanes_per_road", c.grid.lanes_per_road);
        read(g, "lane_width", c.grid.lane_width);
        if (g.contains("control")) c.grid.control = world::control_from_string(g.at("control").get<std::string>());
      }
    }
    read(j, "budgets", c.budgets);
    read(j, "scenes_per_rg", c.scenes_per_rg);
    read(j, "paths_per_scene", c.paths_per_scene);
    read(j, "agent", c.agent);
    if (j.contains("speed_law")) {
      const json& s = j.at("speed_law");
      check_keys(s, {"v0", "alpha", "beta", "v_min", "v_max", "printed_sign"}, "speed_law");
      read(s, "v0", c.speed_law.v0);
      read(s, "alpha", c.speed_law.alpha);
      read(s, "beta", c.speed_law.beta);
      read(s, "v_min", c.speed_law.v_min);
      read(s, "v_max", c.speed_law.v_max);
      read(s, "printed_sign", c.speed_law.printed_sign);
    }
    read(j, "duration", c.duration);
    read(j, "rate", c.rate);
    read(j, "seed", c.seed);
    if (j.contains("out")) c.out = resolve(base, j.at("out").get<std::string>());
    else c.out = resolve(base, "out");
    read(j, "k", c.k);
    read(j, "spacing", c.spacing);
    read(j, "permutations", c.permutations);
    read(j, "jobs", c.jobs);
    read(j, "multiplier", c.multiplier);
    if (j.contains("endpoints")) {
      const json& e = j.at("endpoints");
      check_keys(e, {"r0", "r_step", "r_max", "draws_per_radius"}, "endpoints");
      read(e, "r0", c.endpoints.r0);
      read(e, "r_step", c.endpoints.r_step);
      read(e, "r_max", c.endpoints.r_max);
      read(e, "draws_per_radius", c.endpoints.draws_per_radius);
    }
    if (j.contains("sampler")) {
      const json& s = j.at("sampler");
      check_keys(s, {"max_tries", "npc_speed"}, "sampler");
      read(s, "max_tries", c.sampler.max_tries);
      read(s, "npc_speed", c.sampler.npc_speed);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return RunConfig::from_json(j, path.parent_path());
}

}  // namespace specscen::cli
