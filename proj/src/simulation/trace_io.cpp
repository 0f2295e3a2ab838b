#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "specscen/relations.hpp"
#include "specscen/seeds.hpp"
#include "specscen/simulation.hpp"

namespace specscen::sim {

using nlohmann::json;

const ScriptTrajectory* ScenarioScript::trajectory(const std::string& entity) const {
  for (const auto& t : trajectories)
    if (t.entity == entity) return &t;
  return nullptr;
}

void ScenarioScript::validate() const {
  if (!(rate > 0)) throw std::invalid_argument("script frame rate must be positive");
  if (!(duration > 0)) throw std::invalid_argument("script duration must be positive");
  if (scene.states.empty()) throw std::invalid_argument("script scene has no entities");
  speed_law.validate();
  for (const auto& t : trajectories) {
    bool known = false;
    for (const auto& s : scene.states) known = known || s.id == t.entity;
    if (!known) throw std::invalid_argument("trajectory for unknown entity '" + t.entity + "'");
    if (!t.route.lanes.empty() && t.route.lanes.size() != t.route.points.size())
      throw std::invalid_argument("trajectory lanes and points differ in length");
  }
}

json ScenarioScript::to_json() const {
  json j;
  j["spec"] = spec;
  j["rg"] = rg_id;
  j["configurations"] = configurations;
  j["seed_chain"] = seed_chain;
  j["world"] = world_file.generic_string();
  j["scene"] = scene.to_json();
  j["trajectories"] = json::array();
  for (const auto& t : trajectories) {
    json pts = json::array();
    for (const auto& p : t.route.points) pts.push_back({p.x, p.y});
    j["trajectories"].push_back({{"entity", t.entity}, {"waypoints", t.waypoints}, {"lanes", t.route.lanes}, {"polyline", pts}});
  }
  j["speed_law"] = {{"v0", speed_law.v0},       {"alpha", speed_law.alpha}, {"beta", speed_law.beta},
                    {"v_min", speed_law.v_min}, {"v_max", speed_law.v_max}, {"printed_sign", speed_law.printed_sign}};
  j["duration"] = duration;
  j["rate"] = rate;
  j["seed"] = seed;
  if (!ego_tape.empty()) j["ego_tape"] = ego_tape;
  return j;
}

ScenarioScript ScenarioScript::from_json(const json& j) {
  ScenarioScript s;
  s.spec = j.value("spec", std::string{});
  s.rg_id = j.value("rg", std::string{});
  s.configurations = j.value("configurations", std::vector<std::size_t>{});
  s.seed_chain = j.value("seed_chain", std::map<std::string, std::uint64_t>{});
  s.world_file = j.value("world", std::string{});
  s.scene = scene::Scene::from_json(j.at("scene"));
  for (const auto& t : j.value("trajectories", json::array())) {
    ScriptTrajectory st;
    st.entity = t.at("entity").get<std::string>();
    st.waypoints = t.value("waypoints", std::vector<int>{});
    st.route.lanes = t.value("lanes", std::vector<int>{});
    for (const auto& p : t.at("polyline")) st.route.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    s.trajectories.push_back(std::move(st));
  }
  if (j.contains("speed_law")) {
    const auto& l = j["speed_law"];
    s.speed_law.v0 = l.value("v0", s.speed_law.v0);
    s.speed_law.alpha = l.value("alpha", s.speed_law.alpha);
    s.speed_law.beta = l.value("beta", s.speed_law.beta);
    s.speed_law.v_min = l.value("v_min", s.speed_law.v_min);
    s.speed_law.v_max = l.value("v_max", s.speed_law.v_max);
    s.speed_law.printed_sign = l.value("printed_sign", false);
  }
  s.duration = j.value("duration", s.duration);
  s.rate = j.value("rate", s.rate);
  s.seed = j.value("seed", std::uint64_t{0});
  s.ego_tape = j.value("ego_tape", std::vector<double>{});
  s.validate();
  return s;
}

std::string script_hash(const ScenarioScript& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(s.to_json().dump())));
  return buf;
}

ScenarioScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open script " + path.string());
  try {
    return ScenarioScript::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed script " + path.string() + ": " + e.what());
  }
}

void save_script(const ScenarioScript& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write script " + path.string());
  out << s.to_json().dump(1) << '\n';
}

std::string write_trace(const Trace& t) {
  std::ostringstream out;
  json meta = {{"spec", t.meta.spec},
               {"script", t.meta.script},
               {"script_hash", t.meta.script_hash},
               {"rg", t.meta.rg_id},
               {"configurations", t.meta.configurations},
               {"seed_chain", t.meta.seed_chain},
               {"agent", t.meta.agent},
               {"rate", t.meta.rate},
               {"collision", t.meta.collision},
               {"aborted", t.meta.aborted},
               {"early_terminated", t.meta.early_terminated},
               {"error", t.meta.error},
               {"frames", t.frames.size()}};
  json statics = json::array();
  if (!t.frames.empty()) {
    const auto& g = t.frames.front().graph;
    for (std::size_t i = g.entity_count(); i < g.vertex_count(); ++i) statics.push_back({g.vertex(i).id, g.vertex(i).type});
  }
  out << json{{"meta", meta}, {"statics", statics}}.dump() << '\n';
  const auto& reg = world::relation_registry();
  for (const auto& f : t.frames) {
    json states = json::array();
    for (const auto& s : f.states)
      states.push_back({s.id, s.type, s.pose.position.x, s.pose.position.y, s.pose.heading, s.speed,
                        s.attributes.emergency_lights, s.attributes.sirens});
    json edges = json::array();
    for (const auto& e : f.graph.edges()) edges.push_back({e.src, reg[static_cast<std::size_t>(e.relation)].name, e.dst});
    out << json{{"t", f.time}, {"states", states}, {"edges", edges}}.dump() << '\n';
  }
  return out.str();
}

Trace read_trace(const std::string& ndjson) {
  std::istringstream in(ndjson);
  std::string line;
  Trace t;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace");
  const json head = json::parse(line);
  const json& m = head.at("meta");
  t.meta.spec = m.value("spec", std::string{});
  t.meta.script = m.value("script", std::string{});
  t.meta.script_hash = m.value("script_hash", std::string{});
  t.meta.rg_id = m.value("rg", std::string{});
  t.meta.configurations = m.value("configurations", std::vector<std::size_t>{});
  t.meta.seed_chain = m.value("seed_chain", std::map<std::string, std::uint64_t>{});
  t.meta.agent = m.value("agent", std::string{});
  t.meta.rate = m.value("rate", 20.0);
  t.meta.collision = m.value("collision", false);
  t.meta.aborted = m.value("aborted", false);
  t.meta.early_terminated = m.value("early_terminated", false);
  t.meta.error = m.value("error", std::string{});
  auto statics = std::make_shared<std::vector<world::SgVertex>>();
  for (const auto& v : head.value("statics", json::array())) statics->push_back({v.at(0).get<std::string>(), v.at(1).get<std::string>()});

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json f = json::parse(line);
    Frame fr;
    fr.time = f.at("t").get<double>();
    std::vector<world::SgVertex> entities;
    for (const auto& s : f.at("states")) {
      EntityState st;
      st.id = s.at(0).get<std::string>();
      st.type = s.at(1).get<std::string>();
      st.pose.position = {s.at(2).get<double>(), s.at(3).get<double>()};
      st.pose.heading = s.at(4).get<double>();
      st.speed = s.at(5).get<double>();
      st.attributes.emergency_lights = s.at(6).get<bool>();
      st.attributes.sirens = s.at(7).get<bool>();
      entities.push_back({st.id, st.type});
      fr.states.push_back(std::move(st));
    }
    std::vector<world::SgEdge> edges;
    for (const auto& e : f.at("edges")) {
      const int r = world::relation_index(e.at(1).get<std::string>());
      if (r < 0) throw std::runtime_error("trace uses unknown relation " + e.at(1).get<std::string>());
      edges.push_back({e.at(0).get<int>(), r, e.at(2).get<int>()});
    }
    fr.graph = world::SceneGraph(std::move(entities), statics, std::move(edges));
    t.frames.push_back(std::move(fr));
  }
  return t;
}

void save_trace(const Trace& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  out << write_trace(t);
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_trace(buf.str());
}

}  // namespace specscen::sim
