#include <algorithm>
#include <cmath>
#include <numeric>

#include "specscen/evaluation.hpp"
#include "specscen/seeds.hpp"

namespace specscen::eval {

using spec::Formula;
using spec::Op;

namespace {

bool any_set(const std::vector<char>& v) { return std::find(v.begin(), v.end(), 1) != v.end(); }

bool purely_boolean(const Formula& f) {
  switch (f.op()) {
    case Op::Next:
    case Op::WeakNext:
    case Op::Finally:
    case Op::Globally:
    case Op::Until:
    case Op::Release:
      return false;
    default:
      return std::all_of(f.children().begin(), f.children().end(), purely_boolean);
  }
}

// E && F L with E, L boolean; anything else has no well-defined gap.
std::optional<std::pair<Formula, Formula>> eventually_shape(const Formula& pre) {
  std::vector<Formula> now;
  std::optional<Formula> later;
  for (const auto& c : spec::flatten(pre, Op::And)) {
    if (purely_boolean(c)) {
      now.push_back(c);
    } else if (c.op() == Op::Finally && purely_boolean(c.child(0)) && !later) {
      later = c.child(0);
    } else {
      return std::nullopt;
    }
  }
  if (!later) return std::nullopt;
  return std::make_pair(Formula::conjunction_of(now), *later);
}

std::optional<std::size_t> min_gap(const std::vector<char>& e, const std::vector<char>& l) {
  std::optional<std::size_t> best;
  std::optional<std::size_t> last_e;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e[j]) last_e = j;
    if (l[j] && last_e && (!best || j - *last_e < *best)) best = j - *last_e;
  }
  return best;
}

std::optional<std::pair<std::size_t, std::size_t>> earliest_flip(const spec::OneFlip& of, const ApTrace& v,
                                                                 std::size_t n) {
  const auto e = satisfaction(of.earlier, v, n);
  const auto l = satisfaction(of.later, v, n);
  const auto& a = v.at(of.ap);
  std::vector<const std::vector<char>*> rest;
  for (const auto& g : of.group)
    if (g != of.ap) rest.push_back(&v.at(g));
  auto flips = [&](std::size_t i, std::size_t j) {
    if (!l[j] || a[i] == a[j]) return false;
    return std::all_of(rest.begin(), rest.end(), [&](const std::vector<char>* r) { return (*r)[i] == (*r)[j]; });
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!e[i]) continue;
    if (of.shift == spec::FlipShift::Next) {
      if (flips(i, i + 1)) return std::make_pair(i, i + 1);
    } else {
      for (std::size_t j = i + 1; j < n; ++j)
        if (flips(i, j)) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace

std::size_t CoverageReport::cov1_numerator() const { return covered.size(); }

std::size_t CoverageReport::cov1_denominator() const { return feasible.size() + covered_infeasible.size(); }

double CoverageReport::cov1() const {
  const std::size_t d = cov1_denominator();
  return d ? static_cast<double>(cov1_numerator()) / static_cast<double>(d) : 0.0;
}

SatMatrix satisfaction_matrix_serial(const std::vector<Formula>& configs, const std::vector<ApTrace>& traces,
                                     const std::vector<std::size_t>& lengths) {
  SatMatrix m(traces.size(), std::vector<char>(configs.size(), 0));
  for (std::size_t t = 0; t < traces.size(); ++t)
    for (std::size_t c = 0; c < configs.size(); ++c)
      m[t][c] = lengths[t] > 0 && any_set(satisfaction(configs[c], traces[t], lengths[t]));
  return m;
}

SatMatrix satisfaction_matrix(const std::vector<Formula>& configs, const std::vector<ApTrace>& traces,
                              const std::vector<std::size_t>& lengths) {
  SatMatrix m(traces.size(), std::vector<char>(configs.size(), 0));
  const long cells = static_cast<long>(traces.size() * configs.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long k = 0; k < cells; ++k) {
    const std::size_t t = static_cast<std::size_t>(k) / configs.size();
    const std::size_t c = static_cast<std::size_t>(k) % configs.size();
    m[t][c] = lengths[t] > 0 && any_set(satisfaction(configs[c], traces[t], lengths[t]));
  }
  return m;
}

EvaluatedTraces evaluate_traces(const std::vector<sim::Trace>& traces, const spec::ConfigurationSpace& cs) {
  EvaluatedTraces out;
  out.values.resize(traces.size());
  out.lengths.resize(traces.size());
  const long n = static_cast<long>(traces.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long t = 0; t < n; ++t) {
    out.values[t] = ap_trace(traces[t], cs.aps);
    out.lengths[t] = traces[t].frames.size();
  }
  return out;
}

CoverageReport compute_coverage(const spec::Spec& spec, const spec::ConfigurationSpace& cs,
                                const std::set<std::size_t>& feasible, const EvaluatedTraces& ev,
                                const std::vector<TraceResult>& info) {
  CoverageReport r;
  r.spec = spec.name;
  r.total_configurations = cs.configurations.size();
  r.feasible = feasible;
  r.oneflips = cs.oneflips.size();
  r.cov2_applicable = !cs.oneflips.empty();

  std::vector<Formula> configs;
  for (const auto& c : cs.configurations) configs.push_back(c.formula);
  const SatMatrix m = satisfaction_matrix(configs, ev.values, ev.lengths);

  const Formula pre = spec::normalize(spec.precondition);
  const auto shape = eventually_shape(pre);

  for (std::size_t t = 0; t < ev.values.size(); ++t) {
    TraceResult tr = t < info.size() ? info[t] : TraceResult{};
    tr.configurations.clear();
    for (std::size_t c = 0; c < configs.size(); ++c) {
      if (!m[t][c]) continue;
      tr.configurations.push_back(c);
      if (feasible.count(c)) r.covered.insert(c);
      else r.covered_infeasible.insert(c);
    }
    const std::size_t n = ev.lengths[t];
    if (n > 0) {
      const auto pre_sat = satisfaction(pre, ev.values[t], n);
      tr.precondition = any_set(pre_sat);
      if (shape)
        tr.h = min_gap(satisfaction(shape->first, ev.values[t], n), satisfaction(shape->second, ev.values[t], n));
      if (spec.postcondition && tr.precondition) {
        const auto post = satisfaction(*spec.postcondition, ev.values[t], n);
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i)
          if (pre_sat[i] && !post[i]) ok = false;
        tr.verdict = ok;
      }
    }
    if (tr.h && (!r.h || *tr.h < *r.h)) r.h = tr.h;
    r.traces.push_back(std::move(tr));
  }
  // A covering trace proves feasibility, so these join both sides of cov1.
  for (std::size_t c : r.covered_infeasible) {
    r.covered.insert(c);
    r.warnings.push_back("configuration " + std::to_string(c) + " (" + cs.configurations[c].label +
                         ") covered but not marked feasible");
  }

  for (const auto& of : cs.oneflips) {
    for (std::size_t t = 0; t < ev.values.size(); ++t) {
      if (ev.lengths[t] < 2) continue;
      if (auto w = earliest_flip(of, ev.values[t], ev.lengths[t])) {
        r.covered_oneflips[of.id] = FlipWitness{t, w->first, w->second};
        break;
      }
    }
  }
  return r;
}

CoverageReport compute_coverage(const spec::Spec& spec, const spec::ConfigurationSpace& cs,
                                const std::set<std::size_t>& feasible, const std::vector<sim::Trace>& traces) {
  std::vector<TraceResult> info;
  for (const auto& t : traces) {
    TraceResult tr;
    tr.name = t.meta.script;
    tr.collision = t.meta.collision;
    tr.aborted = t.meta.aborted;
    info.push_back(std::move(tr));
  }
  return compute_coverage(spec, cs, feasible, evaluate_traces(traces, cs), info);
}

namespace {

std::vector<double> permutation_run(const SatMatrix& m, const std::vector<std::size_t>& counted,
                                    std::size_t denominator, std::uint64_t seed, std::size_t p) {
  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "coverage-curve", p));
  rng.shuffle(order);
  std::vector<char> seen(counted.size(), 0);
  std::size_t hits = 0;
  std::vector<double> run;
  run.reserve(m.size());
  for (std::size_t t : order) {
    for (std::size_t k = 0; k < counted.size(); ++k) {
      if (!seen[k] && m[t][counted[k]]) {
        seen[k] = 1;
        ++hits;
      }
    }
    run.push_back(denominator ? static_cast<double>(hits) / static_cast<double>(denominator) : 0.0);
  }
  return run;
}

void summarize(Curve& c, std::size_t n) {
  c.mean.assign(n, 0.0);
  c.stddev.assign(n, 0.0);
  if (c.runs.empty()) return;
  const double count = static_cast<double>(c.runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto& r : c.runs) sum += r[i];
    const double mean = sum / count;
    double var = 0.0;
    for (const auto& r : c.runs) var += (r[i] - mean) * (r[i] - mean);
    c.mean[i] = mean;
    c.stddev[i] = std::sqrt(var / count);
  }
}

std::vector<std::size_t> to_vector(const std::set<std::size_t>& s) { return {s.begin(), s.end()}; }

}  // namespace

Curve coverage_curve_serial(const SatMatrix& m, const std::set<std::size_t>& counted, std::size_t denominator,
                            std::size_t permutations, std::uint64_t seed) {
  if (permutations < 1) throw std::invalid_argument("coverage_curve: permutations must be >= 1");
  const auto cols = to_vector(counted);
  Curve c;
  for (std::size_t p = 0; p < permutations; ++p) c.runs.push_back(permutation_run(m, cols, denominator, seed, p));
  summarize(c, m.size());
  return c;
}

Curve coverage_curve(const SatMatrix& m, const std::set<std::size_t>& counted, std::size_t denominator,
                     std::size_t permutations, std::uint64_t seed) {
  if (permutations < 1) throw std::invalid_argument("coverage_curve: permutations must be >= 1");
  const auto cols = to_vector(counted);
  Curve c;
  c.runs.resize(permutations);
  const long np = static_cast<long>(permutations);
#pragma omp parallel for schedule(static)
  for (long p = 0; p < np; ++p)
    c.runs[p] = permutation_run(m, cols, denominator, seed, static_cast<std::size_t>(p));
  summarize(c, m.size());
  return c;
}

Curve coverage_curve(const std::vector<sim::Trace>& traces, const spec::Spec& spec, const spec::ConfigurationSpace& cs,
                     const std::set<std::size_t>& feasible, std::size_t permutations, std::uint64_t seed) {
  const auto ev = evaluate_traces(traces, cs);
  const auto report = compute_coverage(spec, cs, feasible, ev, {});
  std::vector<Formula> configs;
  for (const auto& c : cs.configurations) configs.push_back(c.formula);
  std::set<std::size_t> counted = feasible;
  counted.insert(report.covered.begin(), report.covered.end());
  return coverage_curve(satisfaction_matrix(configs, ev.values, ev.lengths), counted, report.cov1_denominator(),
                        permutations, seed);
}

}  // namespace specscen::eval
