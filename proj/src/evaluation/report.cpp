#include <cmath>
#include <cstdio>
#include <sstream>

#include "specscen/evaluation.hpp"

namespace specscen::eval {

namespace {

double fixed6(double x) { return std::round(x * 1e6) / 1e6; }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

nlohmann::json CoverageReport::to_json() const {
  using nlohmann::json;
  json j;
  j["spec"] = spec;
  j["agent"] = agent;
  j["configurations"] = total_configurations;
  j["feasible"] = feasible;
  j["covered"] = covered;
  j["covered_infeasible"] = covered_infeasible;
  j["cov1"] = {{"covered", cov1_numerator()}, {"feasible", cov1_denominator()}, {"ratio", fixed6(cov1())}};
  if (cov2_applicable) {
    json flips = json::array();
    for (const auto& [id, w] : covered_oneflips) flips.push_back({{"id", id}, {"trace", w.trace}, {"from", w.from}, {"to", w.to}});
    j["cov2"] = {{"covered", covered_oneflips.size()}, {"total", oneflips}, {"witnesses", flips}};
  } else {
    j["cov2"] = "not-applicable";
  }
  j["cov3"] = cov3();
  j["h"] = h ? json(*h) : json(nullptr);
  if (rg_total) j["rgs"] = {{"feasible", rg_feasible.value_or(0)}, {"total", *rg_total}};
  json ts = json::array();
  for (const auto& t : traces) {
    json e;
    e["trace"] = t.name;
    e["precondition"] = t.precondition;
    e["configurations"] = t.configurations;
    e["h"] = t.h ? json(*t.h) : json(nullptr);
    e["verdict"] = t.verdict ? json(*t.verdict ? "pass" : "fail") : json(nullptr);
    e["collision"] = t.collision;
    e["aborted"] = t.aborted;
    ts.push_back(std::move(e));
  }
  j["traces"] = std::move(ts);
  j["warnings"] = warnings;
  return j;
}

std::string dump_report(const std::vector<CoverageReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  return arr.dump(2) + "\n";
}

std::string format_table(const std::vector<CoverageReport>& reports) {
  const std::size_t w[] = {16, 14, 10, 20, 10, 6, 6};
  std::ostringstream out;
  out << pad("spec", w[0]) << pad("agent", w[1]) << pad("RG", w[2]) << pad("cov1", w[3]) << pad("cov2", w[4])
      << pad("cov3", w[5]) << "h\n";
  for (const auto& r : reports) {
    std::string rg = r.rg_total ? std::to_string(r.rg_feasible.value_or(0)) + "/" + std::to_string(*r.rg_total) : "-";
    std::string c1 = std::to_string(r.cov1_numerator()) + "/" + std::to_string(r.cov1_denominator()) + " (" +
                     fmt("%.0f", 100.0 * r.cov1()) + "%)";
    std::string c2 = r.cov2_applicable
                         ? std::to_string(r.covered_oneflips.size()) + "/" + std::to_string(r.oneflips)
                         : "n/a";
    out << pad(r.spec, w[0]) << pad(r.agent, w[1]) << pad(rg, w[2]) << pad(c1, w[3]) << pad(c2, w[4])
        << pad(r.cov3() ? "yes" : "no", w[5]) << (r.h ? std::to_string(*r.h) : "-") << "\n";
  }
  return out.str();
}

std::string curve_csv(const Curve& c) {
  std::string out = "n,mean,stddev\n";
  for (std::size_t i = 0; i < c.mean.size(); ++i)
    out += std::to_string(i + 1) + "," + fmt("%.6f", c.mean[i]) + "," + fmt("%.6f", c.stddev[i]) + "\n";
  return out;
}

}  // namespace specscen::eval
