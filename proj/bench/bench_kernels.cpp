// Serial reference vs OpenMP for the three parallel kernels. Thread count is
// the benchmark argument; 1 selects the serial path.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "specscen/evaluation.hpp"
#include "specscen/seeds.hpp"
#include "specscen/simulation.hpp"
#include "specscen/spec.hpp"

using namespace specscen;

namespace {

world::RoadWorld straight_road() {
  world::Lane l;
  l.id = 0;
  l.road = 0;
  l.centerline = world::Polyline({{0, 0}, {400, 0}});
  return world::RoadWorld({l}, {});
}

std::vector<sim::ScenarioScript> scripts(std::size_t n) {
  std::vector<sim::ScenarioScript> out;
  for (std::size_t i = 0; i < n; ++i) {
    sim::ScenarioScript s;
    s.spec = "bench";
    s.duration = 10.0;
    world::EntityState ego{"ego", "ego", {{0, 0}, 0}, 0.0, {}};
    world::EntityState car{"Car1", "Car", {{20.0 + static_cast<double>(i % 10), 0}, 0}, 6.0, {}};
    s.scene.states = {ego, car};
    sim::Route r;
    for (double x = 0; x <= 400; x += 5) {
      r.points.push_back({x, 0});
      r.lanes.push_back(0);
    }
    s.trajectories = {{"ego", {}, r}, {"Car1", {}, r}};
    out.push_back(s);
  }
  return out;
}

struct MatrixInput {
  std::vector<spec::Formula> configs;
  std::vector<eval::ApTrace> traces;
  std::vector<std::size_t> lengths;
};

const MatrixInput& matrix_input() {
  static const MatrixInput in = [] {
    MatrixInput m;
    const auto sp = spec::parse_spec(R"(
      ap a := |Car| > 0; ap b := |Bike| > 0; ap c := |ego.near| > 0; ap d := |Car.stopped| > 0;
      pre: !(a && b && c) && !d && X (a && b && c && !d);)");
    const auto cs = spec::enumerate_configurations(spec::normalize(sp.precondition), sp.aps);
    for (const auto& c : cs.configurations) m.configs.push_back(c.formula);
    Rng rng(1);
    for (int t = 0; t < 256; ++t) {
      eval::ApTrace v;
      const std::size_t n = 600;
      for (const char* ap : {"a", "b", "c", "d"}) {
        auto& col = v[ap];
        for (std::size_t i = 0; i < n; ++i) col.push_back(rng.chance(0.6));
      }
      m.traces.push_back(std::move(v));
      m.lengths.push_back(n);
    }
    return m;
  }();
  return in;
}

void BM_BatchSimulation(benchmark::State& st) {
  const auto w = straight_road();
  const auto ss = scripts(32);
  std::vector<sim::BatchJob> jobs;
  for (const auto& s : ss) jobs.push_back({&s, &w});
  const int threads = static_cast<int>(st.range(0));
  for (auto _ : st) {
    auto t = threads <= 1 ? sim::run_batch_serial(jobs, "follower") : sim::run_batch(jobs, "follower", threads);
    benchmark::DoNotOptimize(t);
  }
}

void BM_SatisfactionMatrix(benchmark::State& st) {
  const auto& in = matrix_input();
  const int threads = static_cast<int>(st.range(0));
  omp_set_num_threads(threads);
  for (auto _ : st) {
    auto m = threads <= 1 ? eval::satisfaction_matrix_serial(in.configs, in.traces, in.lengths)
                          : eval::satisfaction_matrix(in.configs, in.traces, in.lengths);
    benchmark::DoNotOptimize(m);
  }
}

void BM_CoverageCurve(benchmark::State& st) {
  Rng rng(3);
  eval::SatMatrix m(80, std::vector<char>(16));
  for (auto& row : m)
    for (auto& x : row) x = rng.chance(0.1);
  std::set<std::size_t> counted;
  for (std::size_t i = 0; i < 16; ++i) counted.insert(i);
  const int threads = static_cast<int>(st.range(0));
  omp_set_num_threads(threads);
  for (auto _ : st) {
    auto c = threads <= 1 ? eval::coverage_curve_serial(m, counted, 16, 2000, 7) : eval::coverage_curve(m, counted, 16, 2000, 7);
    benchmark::DoNotOptimize(c);
  }
}

}  // namespace

BENCHMARK(BM_BatchSimulation)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SatisfactionMatrix)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CoverageCurve)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
