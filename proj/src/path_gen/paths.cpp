#include "specscen/path_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <set>

namespace specscen::path {

using world::WaypointGraph;

bool shorter(const Trajectory& a, const Trajectory& b) {
  if (std::abs(a.length - b.length) > 1e-9) return a.length < b.length;
  return a.waypoints < b.waypoints;
}

Trajectory make_trajectory(const WaypointGraph& wg, std::vector<int> waypoints, std::string entity) {
  Trajectory t;
  t.entity = std::move(entity);
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const auto* e = wg.find_edge(waypoints[i], waypoints[i + 1]);
    if (!e) throw std::invalid_argument("waypoints are not connected");
    t.length += e->length;
  }
  for (int w : waypoints) t.polyline.push_back(wg.node(w).position);
  t.waypoints = std::move(waypoints);
  return t;
}

bool is_valid_path(const WaypointGraph& wg, const std::vector<int>& waypoints) {
  if (waypoints.empty()) return false;
  std::set<int> seen;
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (waypoints[i] < 0 || static_cast<std::size_t>(waypoints[i]) >= wg.size()) return false;
    if (!seen.insert(waypoints[i]).second) return false;
    if (i + 1 < waypoints.size() && !wg.find_edge(waypoints[i], waypoints[i + 1])) return false;
  }
  return true;
}

namespace {

struct Restrictions {
  std::vector<char> node_removed;
  std::set<std::pair<int, int>> edge_removed;
};

// Shortest path from `s` to `t`; among equally short ones the smallest id
// sequence, found by a reverse Dijkstra and a greedy forward walk.
std::optional<std::vector<int>> lex_shortest(const WaypointGraph& wg, const std::vector<std::vector<int>>& rev, int s,
                                             int t, const Restrictions& r) {
  const std::size_t n = wg.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(t)] = 0.0;
  pq.emplace(0.0, t);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (int ei : rev[static_cast<std::size_t>(v)]) {
      const auto& e = wg.edges()[static_cast<std::size_t>(ei)];
      if (r.node_removed[static_cast<std::size_t>(e.src)] || r.edge_removed.count({e.src, e.dst})) continue;
      const double nd = d + e.length;
      if (nd < dist[static_cast<std::size_t>(e.src)]) {
        dist[static_cast<std::size_t>(e.src)] = nd;
        pq.emplace(nd, e.src);
      }
    }
  }
  if (dist[static_cast<std::size_t>(s)] == inf) return std::nullopt;

  std::vector<int> path{s};
  int u = s;
  while (u != t) {
    int best = -1;
    const double du = dist[static_cast<std::size_t>(u)];
    const double tol = 1e-9 * std::max(1.0, du);
    for (int ei : wg.out_edges(u)) {
      const auto& e = wg.edges()[static_cast<std::size_t>(ei)];
      if (r.node_removed[static_cast<std::size_t>(e.dst)] || r.edge_removed.count({e.src, e.dst})) continue;
      if (std::abs(du - (e.length + dist[static_cast<std::size_t>(e.dst)])) <= tol && (best < 0 || e.dst < best)) best = e.dst;
    }
    if (best < 0) return std::nullopt;  // numerical dead end; should not happen with positive weights
    path.push_back(best);
    u = best;
  }
  return path;
}

}  // namespace

std::vector<Trajectory> k_shortest_paths(const WaypointGraph& wg, int start, int goal, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const auto n = static_cast<int>(wg.size());
  if (start < 0 || goal < 0 || start >= n || goal >= n) throw std::invalid_argument("waypoint out of range");

  std::vector<std::vector<int>> rev(wg.size());
  for (std::size_t e = 0; e < wg.edges().size(); ++e)
    rev[static_cast<std::size_t>(wg.edges()[e].dst)].push_back(static_cast<int>(e));

  Restrictions none{std::vector<char>(wg.size(), 0), {}};
  auto first = lex_shortest(wg, rev, start, goal, none);
  if (!first) throw NoPath();

  std::vector<Trajectory> A{make_trajectory(wg, *first)};
  auto cmp = [](const Trajectory& a, const Trajectory& b) { return shorter(a, b); };
  std::set<Trajectory, decltype(cmp)> B(cmp);
  std::set<std::vector<int>> known{*first};

  while (static_cast<int>(A.size()) < k) {
    const std::vector<int> prev = A.back().waypoints;
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
      Restrictions r{std::vector<char>(wg.size(), 0), {}};
      for (const auto& p : A) {
        const auto& w = p.waypoints;
        if (w.size() > i + 1 && std::equal(prev.begin(), prev.begin() + static_cast<long>(i) + 1, w.begin()))
          r.edge_removed.insert({w[i], w[i + 1]});
      }
      for (std::size_t j = 0; j < i; ++j) r.node_removed[static_cast<std::size_t>(prev[j])] = 1;
      auto spur = lex_shortest(wg, rev, prev[i], goal, r);
      if (!spur) continue;
      std::vector<int> total(prev.begin(), prev.begin() + static_cast<long>(i));
      total.insert(total.end(), spur->begin(), spur->end());
      if (known.insert(total).second) B.insert(make_trajectory(wg, std::move(total)));
    }
    if (B.empty()) break;
    A.push_back(*B.begin());
    B.erase(B.begin());
  }
  return A;
}

namespace {

std::vector<world::Vec2> resampled(const Trajectory& t) {
  if (t.polyline.empty()) throw std::invalid_argument("path_distance needs a non-empty polyline");
  if (t.polyline.size() == 1) return std::vector<world::Vec2>(kDistanceSamples, t.polyline.front());
  return world::Polyline(t.polyline).resample(kDistanceSamples);
}

}  // namespace

double path_distance(const Trajectory& p, const Trajectory& q) {
  const auto a = resampled(p);
  const auto b = resampled(q);
  double sum = 0.0;
  for (std::size_t i = 0; i < kDistanceSamples; ++i) sum += world::distance(a[i], b[i]);
  return sum / static_cast<double>(kDistanceSamples);
}

std::vector<Trajectory> select_diverse(const std::vector<Trajectory>& candidates, std::size_t count) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (candidates.empty()) throw std::invalid_argument("select_diverse needs candidates");
  std::vector<char> used(candidates.size(), 0);
  std::size_t seed = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (shorter(candidates[i], candidates[seed])) seed = i;
  std::vector<Trajectory> L{candidates[seed]};
  used[seed] = 1;
  // Running sums of D to the selected set, one per candidate.
  std::vector<double> sum(candidates.size(), 0.0);
  std::size_t last = seed;
  while (L.size() < std::min(count, candidates.size())) {
    std::size_t best = candidates.size();
    double best_avg = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      sum[i] += path_distance(candidates[i], candidates[last]);
      const double avg = sum[i] / static_cast<double>(L.size());
      if (best == candidates.size() || avg > best_avg + 1e-12 ||
          (std::abs(avg - best_avg) <= 1e-12 && shorter(candidates[i], candidates[best]))) {
        best = i;
        best_avg = avg;
      }
    }
    used[best] = 1;
    L.push_back(candidates[best]);
    last = best;
  }
  return L;
}

}  // namespace specscen::path
