// Command-line driver: resonance search on metric graphs, fat-graph waveguide
// eigenvalues, and graph/waveguide closeness studies.

#include <CLI11.hpp>
#include <filesystem>
#include <cstdio>
#include <iostream>

#include "qwg/study.hpp"

namespace {

using namespace qwg;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string tok;
  for (char c : s + ",") {
    if (c == ',') {
      if (!tok.empty()) out.push_back(std::stod(tok));
      tok.clear();
    } else {
      tok += c;
    }
  }
  return out;
}

Rectangle parse_region(const std::string& s) {
  const auto v = parse_list(s);
  if (v.size() != 4)
    fail(ErrorKind::InputError, "--kregion needs re0,re1,im0,im1");
  return {v[0], v[1], v[2], v[3]};
}

int run_validate(const std::string& file) {
  const auto g = load_graph_json(file);
  const auto report = validate(g);
  if (report.ok()) {
    std::printf("ok: %zu vertices, %zu edges, l0=%s, d0=%d\n",
                g.vertices.size(), g.edges.size(),
                format_double(g.effective_l0()).c_str(), g.effective_d0());
    return 0;
  }
  for (const auto& v : report.violations)
    std::printf("violation [%s] %s\n", v.rule.c_str(), v.detail.c_str());
  return 2;
}

void print_resonances(const StudySummary& summary) {
  std::printf("%-24s %-24s %-6s %-20s\n", "re_lambda", "im_lambda", "mult",
              "kind");
  for (const auto& r : summary.graph_resonances)
    std::printf("%-24.12g %-24.12g %-6d %-20s\n", r.lambda.real(),
                r.lambda.imag(), r.multiplicity,
                r.kind == Resonance::Kind::embedded_eigenvalue
                    ? "embedded_eigenvalue"
                    : "resonance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resonances of complex-dilated magnetic graphs and their thin waveguides"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::uint64_t seed = 1;
  double tol_k = 1e-10;
  int threads = 1;
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for contour nudges");
  app.add_option("--tol-k", tol_k, "root refinement tolerance");
  app.add_option("--threads", threads, "worker threads for parameter grids");

  std::string graph_file, theta_s = "0+0.8i", kregion_s = "0.1,14,-2,-0.01";
  std::string eps_s, h_s = "0.05", shift_s, z_s = "-1", gauge_s = "keep";
  std::string out_file;
  double l_ext = 0.0, cut = 0.0;

  auto* val = app.add_subcommand("validate", "check the standing assumptions");
  val->add_option("graph", graph_file, "graph JSON file")->required();

  auto* res = app.add_subcommand("resonances", "secular-determinant zeros in a k-region");
  res->add_option("graph", graph_file)->required();
  res->add_option("--theta", theta_s);
  res->add_option("--kregion", kregion_s);
  res->add_option("--gauge", gauge_s, "keep | away");
  res->add_option("--cut", cut, "Gamma_0 cut distance (default l0)");
  res->add_option("--out", out_file, "CSV path (default <out-dir>/res.csv)");

  auto* wg = app.add_subcommand("waveguide", "fat-graph eigenvalues near the graph targets");
  wg->add_option("--graph", graph_file)->required();
  wg->add_option("--theta", theta_s);
  wg->add_option("--eps", eps_s, "comma list, strictly decreasing")->required();
  wg->add_option("--h", h_s, "mesh sizes (per eps, last repeats)");
  wg->add_option("--shift", shift_s, "extra eigenvalue shifts");
  wg->add_option("--kregion", kregion_s);
  wg->add_option("--lext", l_ext, "exterior truncation length");
  wg->add_option("--cut", cut);
  wg->add_option("--out", out_file, "CSV path (default <out-dir>/wg.csv)");

  auto* cl = app.add_subcommand("closeness", "quasi-unitarity defects and resolvent comparison");
  cl->add_option("--graph", graph_file)->required();
  cl->add_option("--theta", theta_s);
  cl->add_option("--eps", eps_s)->required();
  cl->add_option("--h", h_s);
  cl->add_option("--z", z_s, "resolvent comparison point");
  cl->add_option("--lext", l_ext);
  cl->add_option("--cut", cut);
  cl->add_option("--out", out_file, "CSV path (default <out-dir>/delta.csv)");

  auto* demo = app.add_subcommand("lasso-demo", "loop-with-lead reference study");
  demo->add_option("--eps", eps_s);
  demo->add_option("--h", h_s);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config;
    config.out_dir = out_dir;
    config.seed = seed;
    config.tol_k = tol_k;
    config.threads = threads;
    config.thetas = {parse_complex(theta_s)};
    config.h_list = parse_list(h_s);
    config.l_ext = l_ext;
    config.cut = cut;
    if (!eps_s.empty()) config.eps_list = parse_list(eps_s);
    if (!shift_s.empty())
      for (const auto& v : parse_list(shift_s)) config.shifts.push_back(v);
    config.z = parse_complex(z_s);

    if (val->parsed()) return run_validate(graph_file);

    if (demo->parsed()) {
      config.graph = make_lasso();
      config.graph_name = "lasso";
      config.k_region = {-0.5, 13.5, -1.5, -0.01};
      auto summary = run_resonance_study(config);
      print_resonances(summary);
      // the embedded eigenvalues sit on the real axis; scan them separately
      ExperimentConfig embedded = config;
      embedded.eps_list.clear();
      embedded.k_region = {5.0, 14.0, -0.1, 0.1};
      embedded.out_dir = out_dir + "/embedded";
      print_resonances(run_resonance_study(embedded));
      return summary.pass ? 0 : 1;
    }

    config.graph = load_graph_json(graph_file);
    config.graph_name = graph_file;
    config.k_region = parse_region(kregion_s);

    auto relocate = [&](const char* produced) {
      if (out_file.empty()) return;
      namespace fs = std::filesystem;
      const fs::path src = fs::path(config.out_dir) / produced;
      const fs::path dst(out_file);
      if (dst.has_parent_path()) fs::create_directories(dst.parent_path());
      fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
      fs::remove(src);
    };

    if (res->parsed()) {
      config.gauge = gauge_s == "away";
      config.eps_list.clear();
      auto summary = run_resonance_study(config);
      relocate("res.csv");
      print_resonances(summary);
      return 0;
    }
    if (wg->parsed()) {
      auto summary = run_resonance_study(config);
      relocate("wg.csv");
      for (const auto& t : summary.targets) {
        std::printf("target %.10g%+.10gi:", t.lambda0.real(), t.lambda0.imag());
        for (std::size_t i = 0; i < t.eps.size(); ++i)
          std::printf(" eps=%g err=%.3e%s", t.eps[i],
                      std::abs(t.lambda_eps[i] - t.lambda0),
                      t.matched[i] ? "" : "(unmatched)");
        std::printf(" slope=%.2f\n", t.slope);
      }
      return summary.pass ? 0 : 1;
    }
    if (cl->parsed()) {
      auto summary = run_closeness_study(config);
      relocate("delta.csv");
      for (const auto& row : summary.closeness)
        std::printf(
            "eps=%g h=%g adj=%.3e inv1=%.3e inv2=%.3e form=%.3e res=%.3e\n",
            row.eps, row.h, row.delta_adj, row.delta_inv1, row.delta_inv2,
            row.delta_form, row.res_diff);
      for (const auto& [name, slope] : summary.slopes)
        std::printf("slope %-12s %s\n", name.c_str(),
                    std::isnan(slope) ? "exact" : format_double(slope).c_str());
      return summary.pass ? 0 : 1;
    }
  } catch (const qwg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
