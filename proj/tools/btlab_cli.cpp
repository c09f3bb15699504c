// Command-line front end: `btlab <subcommand> [options]`.
// Exit codes: 0 pass, 2 acceptance failure, 1 usage or configuration error.

#include "btlab/harness.hpp"
#include "btlab/symplin.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

using namespace btlab;
using nlohmann::json;

namespace {

json mat_json(const Mat& M) {
  json a = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    a.push_back(r);
  }
  return a;
}

Mat parse_matrix(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("matrix must be a JSON array of rows: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw ArgumentError("matrix must be a non-empty array of rows");
  Mat A(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size()) throw ArgumentError("matrix rows differ in length");
    for (std::size_t c = 0; c < j[i].size(); ++c) A(i, c) = j[i][c].get<double>();
  }
  return A;
}

bool ci_mode() {
  const char* ci = std::getenv("CI");
  return ci && *ci && std::string(ci) != "0" && std::string(ci) != "false";
}

struct RunFlags {
  std::string config;
  std::vector<int> ks;
  std::optional<double> tau0;
  std::vector<double> tau;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--k", f.ks, "override the k list")->delimiter(',');
  sub->add_option("--tau0", f.tau0, "override tau0");
  sub->add_option("--tau", f.tau, "override the tau schedule values")->delimiter(',');
  sub->add_option("--out", f.out, "output prefix: writes <out>.csv and <out>.json");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--tol", f.tol, "flow integration tolerance");
}

ExperimentConfig build_config(const RunFlags& f) {
  ExperimentConfig c = load_config(f.config);
  if (!f.ks.empty()) c.ks = f.ks;
  if (f.tau0) c.tau0 = *f.tau0;
  if (!f.tau.empty()) c.tau.values = f.tau;
  if (f.seed) {
    c.seed = *f.seed;
    c.seedGiven = true;
  }
  if (f.tol) c.flowTol = *f.tol;
  if (!f.out.empty()) {
    c.outCsv = f.out + ".csv";
    c.outJson = f.out + ".json";
  }
  if (ci_mode() && !c.seedGiven) throw ArgumentError("--seed is required in CI mode");
  c.validate();
  return c;
}

int finish(const ConvergenceReport& r) {
  write_outputs(r);
  for (const auto& s : r.series) {
    std::cout << r.experiment << ' ' << s.label << " slope=" << s.fit.slope << " +/- " << s.fit.halfWidth
              << " expected=" << s.expectedSlope << " monotone=" << (s.monotone ? "yes" : "no") << ' '
              << (s.pass ? "PASS" : "FAIL") << '\n';
  }
  if (r.config.outCsv.empty()) std::cout << report_csv(r);
  return r.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Berezin-Toeplitz quantization lab on CP1"};
  app.require_subcommand(1);

  std::string matrix;
  auto* poincare = app.add_subcommand("poincare", "print Poincare data of a symplectic matrix");
  poincare->add_option("--matrix", matrix, "JSON rows, e.g. [[1,0],[0,1]]")->required();

  RunFlags kf, tf, rf;
  add_run_flags(app.add_subcommand("kernel-scaling", "near-diagonal kernel scaling against the local law"), kf);
  add_run_flags(app.add_subcommand("trace-fixed", "fixed-time trace against the fixed-locus prediction"), tf);
  add_run_flags(app.add_subcommand("trace-rescaled", "rescaled trace against the critical-point prediction"), rf);

  std::optional<std::uint64_t> stSeed;
  std::string stOut;
  auto* st = app.add_subcommand("selftest", "run the property suites");
  st->add_option("--seed", stSeed, "random seed");
  st->add_option("--out", stOut, "write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*poincare) {
      SymplecticMap A = SymplecticMap::make(parse_matrix(matrix));
      PoincareData pd = poincare_data(A);
      json j = {{"d", A.d}, {"nu", pd.nuA}, {"Q", mat_json(pd.QA)}, {"P", mat_json(pd.PA)}, {"R", mat_json(pd.RA)}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    for (auto [name, flags] : {std::pair{"kernel-scaling", &kf}, {"trace-fixed", &tf}, {"trace-rescaled", &rf}}) {
      if (!app.got_subcommand(name)) continue;
      ExperimentConfig c = build_config(*flags);
      std::string n = name;
      if (n == "kernel-scaling") return finish(run_kernel_scaling(c));
      if (n == "trace-fixed") return finish(run_trace_fixed(c));
      return finish(run_trace_rescaled(c));
    }
    if (*st) {
      if (ci_mode() && !stSeed) throw ArgumentError("--seed is required in CI mode");
      json rep = selftest(stSeed.value_or(1));
      std::string text = rep.dump(2) + "\n";
      if (stOut.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(stOut);
        if (!f) throw ArgumentError("cannot write " + stOut);
        f << text;
      }
      return rep["pass"].get<bool>() ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "btlab: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
