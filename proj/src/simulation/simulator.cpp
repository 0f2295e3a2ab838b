#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specscen/relations.hpp"
#include "specscen/simulation.hpp"

namespace specscen::sim {

namespace {

void quantize_state(EntityState& s) {
  s.pose.position = {world::quantize(s.pose.position.x), world::quantize(s.pose.position.y)};
  s.pose.heading = world::quantize(s.pose.heading);
  s.speed = world::quantize(s.speed);
}

void integrate(EntityState& s, double speed, Vec2 aim, double dt) {
  s.speed = std::max(0.0, speed);
  if (s.speed > 0) {
    const Vec2 to = aim - s.pose.position;
    if (world::norm(to) > 1e-9) {
      const double want = world::wrap_angle(std::atan2(to.y, to.x) - s.pose.heading);
      const double max_turn = kMaxHeadingRate * dt;
      s.pose.heading = world::wrap_angle(s.pose.heading + std::clamp(want, -max_turn, max_turn));
    }
    s.pose.position = s.pose.position + world::unit(s.pose.heading) * (s.speed * dt);
  }
  quantize_state(s);
}

}  // namespace

Trace run_simulation(const ScenarioScript& script, const world::RoadWorld& world, Agent& ego_agent) {
  script.validate();
  const double dt = 1.0 / script.rate;
  const auto steps = static_cast<long>(std::floor(script.duration * script.rate + 1e-9));

  Trace trace;
  trace.meta.spec = script.spec;
  trace.meta.rg_id = script.rg_id;
  trace.meta.configurations = script.configurations;
  trace.meta.seed_chain = script.seed_chain;
  trace.meta.rate = script.rate;
  trace.meta.script_hash = script_hash(script);

  std::vector<EntityState> states = script.scene.states;
  for (auto& s : states) quantize_state(s);
  std::size_t ego = states.size();
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].type == world::kEgoType) ego = i;
  if (ego == states.size()) throw std::invalid_argument("script scene has no ego");

  std::vector<std::optional<RouteTracker>> npc(states.size());
  bool any_route = false;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const ScriptTrajectory* t = script.trajectory(states[i].id);
    Route r = t ? t->route : Route{{states[i].pose.position}, {}};
    if (!r.trivial()) any_route = true;
    if (i == ego) ego_agent.reset(r);
    else npc[i].emplace(std::move(r));
  }

  world::SceneGraphBuilder builder(world);
  std::vector<char> frozen(states.size(), 0);
  trace.frames.push_back({0.0, states, builder(states)});

  std::vector<EntityState> others;
  for (long step = 1; step <= steps; ++step) {
    const double t_prev = static_cast<double>(step - 1) * dt;
    others.clear();
    for (std::size_t i = 0; i < states.size(); ++i)
      if (i != ego) others.push_back(states[i]);

    Control ego_ctl;
    try {
      ego_ctl = ego_agent.step(Observation{states[ego], others, t_prev, dt});
    } catch (const std::exception& e) {
      trace.meta.aborted = true;
      trace.meta.error = e.what();
      break;
    }

    std::vector<std::pair<double, Vec2>> npc_ctl(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (i == ego) continue;
      auto& tr = *npc[i];
      tr.update(states[i].pose.position);
      if (tr.finished()) {
        npc_ctl[i] = {0.0, states[i].pose.position};
        continue;
      }
      const Vec2 aim = tr.lookahead(npc_lookahead(states[i].speed));
      double v = npc_speed(longitudinal_deviation(states[i], states[ego]), script.speed_law);
      v = std::min(v, npc_turn_cap(states[i], aim));
      npc_ctl[i] = {v, aim};
    }

    for (std::size_t i = 0; i < states.size(); ++i) {
      if (frozen[i]) continue;
      if (i == ego) integrate(states[i], ego_ctl.target_speed, ego_ctl.aim, dt);
      else integrate(states[i], npc_ctl[i].first, npc_ctl[i].second, dt);
    }

    for (std::size_t a = 0; a < states.size(); ++a) {
      for (std::size_t b = a + 1; b < states.size(); ++b) {
        const auto ca = world::footprint_corners(states[a].pose, world::footprint_for(states[a].type));
        const auto cb = world::footprint_corners(states[b].pose, world::footprint_for(states[b].type));
        if (world::rectangles_overlap(ca, cb)) {
          frozen[a] = frozen[b] = 1;
          states[a].speed = states[b].speed = 0.0;
          trace.meta.collision = true;
        }
      }
    }

    trace.frames.push_back({world::quantize(static_cast<double>(step) * dt), states, builder(states)});

    bool all_done = ego_agent.finished();
    for (std::size_t i = 0; i < states.size() && all_done; ++i)
      if (i != ego && !npc[i]->finished() && !frozen[i]) all_done = false;
    if (any_route && all_done) {
      trace.meta.early_terminated = step < steps;
      break;
    }
  }
  return trace;
}

std::vector<Trace> run_batch_serial(std::span<const BatchJob> jobs, const std::string& agent) {
  std::vector<Trace> out;
  out.reserve(jobs.size());
  for (const auto& j : jobs) {
    auto a = make_agent(agent, AgentContext{j.world, j.script->ego_tape});
    out.push_back(run_simulation(*j.script, *j.world, *a));
    out.back().meta.agent = agent;
  }
  return out;
}

std::vector<Trace> run_batch(std::span<const BatchJob> jobs, const std::string& agent, int threads) {
  make_agent(agent, AgentContext{jobs.empty() ? nullptr : jobs.front().world, {}});  // fail fast on unknown names
  if (threads <= 1) return run_batch_serial(jobs, agent);
  std::vector<Trace> out(jobs.size());
  std::vector<std::string> errors(jobs.size());
  const long n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    const auto& j = jobs[static_cast<std::size_t>(i)];
    try {
      auto a = make_agent(agent, AgentContext{j.world, j.script->ego_tape});
      out[static_cast<std::size_t>(i)] = run_simulation(*j.script, *j.world, *a);
      out[static_cast<std::size_t>(i)].meta.agent = agent;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  return out;
}

}  // namespace specscen::sim
