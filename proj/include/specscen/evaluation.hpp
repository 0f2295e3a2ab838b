#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "specscen/configurations.hpp"
#include "specscen/formula.hpp"
#include "specscen/rfol.hpp"
#include "specscen/scene_graph.hpp"
#include "specscen/simulation.hpp"
#include "specscen/spec.hpp"

namespace specscen::eval {

struct UnknownName : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Sorted vertex indices.
using VertexSet = std::vector<int>;

VertexSet eval_set(const spec::SetExpr& s, const world::SceneGraph& sg);
bool eval_rfol(const spec::RfolExpr& e, const world::SceneGraph& sg);

/// AP name -> truth value per frame.
using ApTrace = std::map<std::string, std::vector<char>, std::less<>>;

/// Truth of every AP of `aps` at every frame of `trace`.
ApTrace ap_trace(const sim::Trace& trace, const spec::ApTable& aps);

/// Satisfaction of `f` at every position of a length-n trace. Strong X, weak N.
std::vector<char> satisfaction(const spec::Formula& f, const ApTrace& v, std::size_t n);

bool eval_ltlf(const spec::Formula& f, const ApTrace& v, std::size_t n, std::size_t start);
bool eval_ltlf(const spec::Formula& f, const sim::Trace& trace, std::size_t start, const spec::ApTable& aps);

/// First position at which `f` holds, if any.
std::optional<std::size_t> first_satisfied(const spec::Formula& f, const ApTrace& v, std::size_t n);

/// Row per trace, column per configuration: 1 when the configuration formula
/// holds at some start frame of the trace.
using SatMatrix = std::vector<std::vector<char>>;

SatMatrix satisfaction_matrix_serial(const std::vector<spec::Formula>& configs, const std::vector<ApTrace>& traces,
                                     const std::vector<std::size_t>& lengths);
SatMatrix satisfaction_matrix(const std::vector<spec::Formula>& configs, const std::vector<ApTrace>& traces,
                              const std::vector<std::size_t>& lengths);

struct FlipWitness {
  std::size_t trace = 0;
  std::size_t from = 0;
  std::size_t to = 0;
};

struct TraceResult {
  std::string name;
  bool precondition = false;
  std::vector<std::size_t> configurations;
  std::optional<std::size_t> h;
  std::optional<bool> verdict;  // empty without a postcondition or when vacuous
  bool collision = false;
  bool aborted = false;
};

struct CoverageReport {
  std::string spec;
  std::string agent;
  std::size_t total_configurations = 0;
  std::set<std::size_t> feasible;
  std::set<std::size_t> covered;
  std::set<std::size_t> covered_infeasible;  // counted as feasible, with a warning
  bool cov2_applicable = false;
  std::size_t oneflips = 0;
  std::map<std::size_t, FlipWitness> covered_oneflips;
  std::optional<std::size_t> h;
  std::vector<TraceResult> traces;
  std::vector<std::string> warnings;
  // Filled by the pipeline when RG generation ran.
  std::optional<std::size_t> rg_feasible;
  std::optional<std::size_t> rg_total;

  std::size_t cov1_numerator() const;
  std::size_t cov1_denominator() const;
  double cov1() const;
  bool cov3() const { return cov1_numerator() > 0; }

  nlohmann::json to_json() const;
};

struct EvaluatedTraces {
  std::vector<ApTrace> values;
  std::vector<std::size_t> lengths;
};

EvaluatedTraces evaluate_traces(const std::vector<sim::Trace>& traces, const spec::ConfigurationSpace& cs);

/// `names` labels the traces in the report (defaults to script stems).
CoverageReport compute_coverage(const spec::Spec& spec, const spec::ConfigurationSpace& cs,
                                const std::set<std::size_t>& feasible, const std::vector<sim::Trace>& traces);
CoverageReport compute_coverage(const spec::Spec& spec, const spec::ConfigurationSpace& cs,
                                const std::set<std::size_t>& feasible, const EvaluatedTraces& evaluated,
                                const std::vector<TraceResult>& info);

struct Curve {
  std::vector<double> mean;    // index n-1 for prefix length n
  std::vector<double> stddev;  // population standard deviation
  std::vector<std::vector<double>> runs;  // per permutation
};

/// cov1 over prefixes of `permutations` seeded shuffles of the trace rows.
/// The denominator is fixed to the full report's.
Curve coverage_curve_serial(const SatMatrix& m, const std::set<std::size_t>& counted, std::size_t denominator,
                            std::size_t permutations, std::uint64_t seed);
Curve coverage_curve(const SatMatrix& m, const std::set<std::size_t>& counted, std::size_t denominator,
                     std::size_t permutations, std::uint64_t seed);
Curve coverage_curve(const std::vector<sim::Trace>& traces, const spec::Spec& spec,
                     const spec::ConfigurationSpace& cs, const std::set<std::size_t>& feasible,
                     std::size_t permutations, std::uint64_t seed);

std::string format_table(const std::vector<CoverageReport>& reports);
std::string curve_csv(const Curve& c);
std::string dump_report(const std::vector<CoverageReport>& reports);  // fixed-precision JSON

}  // namespace specscen::eval
