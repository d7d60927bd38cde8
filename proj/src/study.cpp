#include "qwg/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qwg/eigs.hpp"

namespace qwg {

void ExperimentConfig::check() const {
  for (cplx th : thetas)
    (void)Dilation{th};  // throws InputError when outside the strip
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      fail(ErrorKind::InputError, "eps list must be strictly decreasing");
  if (h_list.empty())
    fail(ErrorKind::InputError, "need at least one mesh size");
}

double ExperimentConfig::h_for(std::size_t i) const {
  return h_list[std::min(i, h_list.size() - 1)];
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a over a canonical rendering of the run parameters
  std::string s = graph_name;
  auto put = [&s](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    s += buf;
  };
  for (cplx t : thetas) {
    put(t.real());
    put(t.imag());
  }
  for (double e : eps_list) put(e);
  for (double h : h_list) put(h);
  put(k_region.re0);
  put(k_region.re1);
  put(k_region.im0);
  put(k_region.im1);
  for (cplx sh : shifts) {
    put(sh.real());
    put(sh.imag());
  }
  put(static_cast<double>(seed));
  put(tol_k);
  put(gauge ? 1.0 : 0.0);
  put(l_ext);
  put(cut);
  put(z.real());
  put(z.imag());
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::optional<double> loglog_slope(const std::vector<double>& eps,
                                   const std::vector<double>& err,
                                   double floor) {
  if (eps.size() < 3 || eps.size() != err.size()) return std::nullopt;
  double max_err = 0.0;
  for (double e : err) max_err = std::max(max_err, e);
  if (max_err <= floor) return std::nullopt;  // exact to tolerance
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double x = std::log(eps[i]);
    const double y = std::log(std::max(err[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

cplx parse_complex(const std::string& text) {
  // forms: "a", "bi"/"bj", "a+bi", "a-bi"
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) fail(ErrorKind::InputError, "empty complex literal");
  const bool has_i = s.back() == 'i' || s.back() == 'j';
  if (!has_i) return {std::stod(s), 0.0};
  s.pop_back();
  // locate the split sign (not the leading one, not after e/E)
  for (std::size_t p = s.size(); p-- > 1;) {
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      const double re = std::stod(s.substr(0, p));
      const std::string imtxt = s.substr(p);
      const double im = (imtxt == "+" || imtxt == "-") ? std::stod(imtxt + "1")
                                                       : std::stod(imtxt);
      return {re, im};
    }
  }
  if (s.empty() || s == "+") return {0.0, 1.0};
  if (s == "-") return {0.0, -1.0};
  return {0.0, std::stod(s)};
}

namespace {

void write_file(const std::string& dir, const std::string& name,
                const std::string& body) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) fail(ErrorKind::InputError, "cannot write " + dir + "/" + name);
  out << body;
}

std::string kind_name(Resonance::Kind k) {
  return k == Resonance::Kind::embedded_eigenvalue ? "embedded_eigenvalue"
                                                   : "resonance";
}

}  // namespace

StudySummary run_resonance_study(const ExperimentConfig& config) {
  config.check();
  StudySummary summary;
  const Dilation dil(config.thetas.front());
  const auto dec = normalize_and_decompose(config.graph, config.cut);

  GaugedSystem gauged;
  const GaugedSystem* gptr = nullptr;
  if (config.gauge) {
    gauged = gauge_away(dec.internal);
    gptr = &gauged;
  }

  ResonanceOptions ropts;
  ropts.root.tol_k = config.tol_k;
  ropts.root.seed = config.seed;
  summary.graph_resonances = find_resonances(dec, dil, config.k_region, ropts, gptr);

  std::string csv = "re_k,im_k,re_lambda,im_lambda,residual,multiplicity,kind\n";
  for (const auto& r : summary.graph_resonances) {
    csv += format_double(r.k.real()) + "," + format_double(r.k.imag()) + "," +
           format_double(r.lambda.real()) + "," + format_double(r.lambda.imag()) +
           "," + format_double(r.residual) + "," +
           std::to_string(r.multiplicity) + "," + kind_name(r.kind) + "\n";
  }
  char hashline[64];
  std::snprintf(hashline, sizeof hashline, "# config-hash: %016llx\n",
                static_cast<unsigned long long>(config.hash()));
  csv += hashline;
  write_file(config.out_dir, "res.csv", csv);

  if (config.eps_list.empty()) return summary;

  // spectral gap guard for the nearest-lambda matching
  std::vector<cplx> lams;
  for (const auto& r : summary.graph_resonances) lams.push_back(r.lambda);
  double gap = 1e30;
  for (std::size_t i = 0; i < lams.size(); ++i)
    for (std::size_t j = i + 1; j < lams.size(); ++j)
      gap = std::min(gap, std::abs(lams[i] - lams[j]));
  if (lams.size() < 2) gap = 2.0 * std::abs(lams.empty() ? 1.0 : lams[0]) + 2.0;

  for (const auto& r : summary.graph_resonances) {
    TargetSeries ts;
    ts.lambda0 = r.lambda;
    ts.kind = kind_name(r.kind);
    summary.targets.push_back(ts);
  }

  std::string wgcsv = "eps,h,re_lambda,im_lambda,residual,tail_mass,kept\n";
  for (std::size_t ie = 0; ie < config.eps_list.size(); ++ie) {
    const double eps = config.eps_list[ie];
    const double h = config.h_for(ie);
    BuildOptions bopts;
    bopts.l_ext = config.l_ext;
    if (config.l_ext <= 0.0) {
      // truncation long enough for the slowest-decaying target
      double decay = 1e30;
      for (const auto& r : summary.graph_resonances) {
        const double d = (std::exp(dil.theta) * std::sqrt(r.lambda)).imag();
        if (d > 1e-6) decay = std::min(decay, d);
      }
      bopts.l_ext = decay < 1e29 ? 6.0 / decay : 6.0;
    }
    const auto model = build_model(dec, eps, dil, bopts);
    const auto mesh = std::make_shared<const Mesh>(generate_mesh(model, h));
    const auto op = assemble(mesh, dil);

    std::vector<EigPair> pairs;
    for (const auto& target : summary.graph_resonances) {
      auto got = solve_eigs(op.A, op.B, target.lambda, 4);
      for (auto& p : got) {
        bool dup = false;
        for (const auto& q : pairs)
          if (std::abs(p.lambda - q.lambda) < 1e-9 * (1.0 + std::abs(p.lambda)))
            dup = true;
        if (!dup) pairs.push_back(std::move(p));
      }
    }
    const auto cands = filter_resonances(pairs, op);
    for (const auto& c : cands)
      wgcsv += format_double(eps) + "," + format_double(h) + "," +
               format_double(c.lambda.real()) + "," +
               format_double(c.lambda.imag()) + "," + format_double(c.residual) +
               "," + format_double(c.tail_mass) + "," + (c.kept ? "1" : "0") +
               "\n";

    for (auto& ts : summary.targets) {
      double best = 1e30;
      cplx best_lam = 0.0;
      int close_count = 0;
      for (const auto& c : cands) {
        if (!c.kept) continue;
        const double d = std::abs(c.lambda - ts.lambda0);
        if (d < best) {
          best = d;
          best_lam = c.lambda;
        }
        if (d < 0.5 * gap) ++close_count;
      }
      ts.eps.push_back(eps);
      ts.lambda_eps.push_back(best_lam);
      ts.matched.push_back(best < 0.5 * gap);
      ts.ambiguous.push_back(close_count > 1);
    }
  }
  wgcsv += hashline;
  write_file(config.out_dir, "wg.csv", wgcsv);

  for (auto& ts : summary.targets) {
    std::vector<double> errs;
    bool all = true;
    for (std::size_t i = 0; i < ts.eps.size(); ++i) {
      if (!ts.matched[i]) all = false;
      errs.push_back(std::abs(ts.lambda_eps[i] - ts.lambda0));
    }
    ts.monotone = all && errs.size() >= 2;
    for (std::size_t i = 1; i < errs.size(); ++i)
      if (!(errs[i] < errs[i - 1])) ts.monotone = false;
    if (auto s = loglog_slope(ts.eps, errs)) ts.slope = *s;
    if (!all) summary.pass = false;
  }
  return summary;
}

StudySummary run_closeness_study(const ExperimentConfig& config) {
  config.check();
  StudySummary summary;
  const Dilation dil(config.thetas.front());
  const auto dec = normalize_and_decompose(config.graph, config.cut);

  for (std::size_t ie = 0; ie < config.eps_list.size(); ++ie) {
    const double eps = config.eps_list[ie];
    const double h = config.h_for(ie);
    BuildOptions bopts;
    bopts.l_ext = config.l_ext > 0.0 ? config.l_ext : 8.0;
    const auto model = build_model(dec, eps, dil, bopts);
    const auto mesh = std::make_shared<const Mesh>(generate_mesh(model, h));
    const auto op = assemble(mesh, dil);
    const auto gd = discretize_graph(model, *mesh, dil);
    const auto maps = build_maps(gd, *mesh, model);
    const auto rep = delta_report(gd, op, maps);
    const auto rd = resolvent_diff_norm(config.z, gd, op, maps);
    summary.closeness.push_back({eps, h, rep.delta_adj, rep.delta_inv1,
                                 rep.delta_inv2, rep.delta_form, rd.norm_jr_rj});
  }

  std::string csv = "eps,h,delta_adj,delta_inv1,delta_inv2,delta_form,res_diff\n";
  for (const auto& row : summary.closeness)
    csv += format_double(row.eps) + "," + format_double(row.h) + "," +
           format_double(row.delta_adj) + "," + format_double(row.delta_inv1) +
           "," + format_double(row.delta_inv2) + "," +
           format_double(row.delta_form) + "," + format_double(row.res_diff) +
           "\n";

  const char* names[5] = {"delta_adj", "delta_inv1", "delta_inv2", "delta_form",
                          "res_diff"};
  std::vector<double> eps;
  for (const auto& row : summary.closeness) eps.push_back(row.eps);
  std::string slope_row = "slope,";
  for (int c = 0; c < 5; ++c) {
    std::vector<double> vals;
    for (const auto& row : summary.closeness) {
      const double v[5] = {row.delta_adj, row.delta_inv1, row.delta_inv2,
                           row.delta_form, row.res_diff};
      vals.push_back(v[c]);
    }
    const auto s = loglog_slope(eps, vals);
    if (s) {
      summary.slopes.emplace_back(names[c], *s);
      slope_row += "," + format_double(*s);
      if (*s < 0.4) summary.pass = false;
    } else {
      summary.slopes.emplace_back(names[c], std::nan(""));
      slope_row += ",exact";
    }
  }
  csv += slope_row + "\n";
  char hashline[64];
  std::snprintf(hashline, sizeof hashline, "# config-hash: %016llx\n",
                static_cast<unsigned long long>(config.hash()));
  csv += hashline;
  write_file(config.out_dir, "delta.csv", csv);
  return summary;
}

}  // namespace qwg
