#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qwg/closeness.hpp"
#include "qwg/resonances.hpp"

namespace qwg {

struct ExperimentConfig {
  MetricGraph graph;
  std::string graph_name = "graph";
  std::vector<cplx> thetas = {cplx(0.0, 0.8)};
  std::vector<double> eps_list;        // strictly decreasing when non-empty
  std::vector<double> h_list = {0.05}; // per-eps mesh size (last repeats)
  Rectangle k_region{0.1, 14.0, -2.0, -0.01};
  std::vector<cplx> shifts;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  double tol_k = 1e-10;
  int threads = 1;
  bool gauge = false;     // true: run on the gauged phase-twisted system
  double l_ext = 0.0;     // 0: automatic from the first shift
  double cut = 0.0;       // Gamma_0 cut distance, 0: l0
  cplx z{-1.0, 0.0};      // resolvent comparison point

  void check() const;
  std::uint64_t hash() const;
  double h_for(std::size_t eps_index) const;
};

struct TargetSeries {
  cplx lambda0;
  std::string kind;
  std::vector<double> eps;
  std::vector<cplx> lambda_eps;  // matched waveguide candidate per eps
  std::vector<bool> matched;
  std::vector<bool> ambiguous;
  double slope = 0.0;            // log-log error slope, needs >= 3 points
  bool monotone = false;
};

struct ClosenessRow {
  double eps, h;
  double delta_adj, delta_inv1, delta_inv2, delta_form, res_diff;
};

struct StudySummary {
  std::vector<Resonance> graph_resonances;
  std::vector<TargetSeries> targets;
  std::vector<ClosenessRow> closeness;
  std::vector<std::pair<std::string, double>> slopes;
  bool pass = true;
  std::vector<std::string> notes;
};

StudySummary run_resonance_study(const ExperimentConfig& config);
StudySummary run_closeness_study(const ExperimentConfig& config);

/// log-log least-squares slope of err vs eps; values below `floor` are
/// treated as exactly zero (slope undefined -> reported as passing "exact").
std::optional<double> loglog_slope(const std::vector<double>& eps,
                                   const std::vector<double>& err,
                                   double floor = 1e-10);

cplx parse_complex(const std::string& text);
std::string format_double(double v);

}  // namespace qwg
