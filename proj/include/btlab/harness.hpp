#pragma once

#include "btlab/asymptotics.hpp"
#include "btlab/common.hpp"
#include "btlab/dynamics.hpp"
#include "btlab/quantization.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace btlab {

// ϱ(τ, n) = c0 + c·n (τ-independent).
struct SymbolSpec {
  std::string type = "constant";  // "constant" or "affine"
  double c0 = 1.0;
  Vec3 c = Vec3::Zero();

  bool trivial() const { return c0 == 1.0 && c.isZero(0.0); }
  SymbolFamily family() const;
  Symbol slice() const;
};

struct ProbeSpec {
  std::string name;
  // "fixed-point": U(x+v/√k, x+v/√k) against the same-chart law (u = w = v),
  // "generic": U(x+u/√k, x_{τ₀}+w/√k) at τ₀+τ/√k,
  // "off-graph": |U(x, y)| with dist_M(x_{τ₀}, y) = separation,
  // "off-locus": |U(x, x)| at a point moved by the flow.
  std::string kind = "generic";
  C2 point{1.0, 0.0};
  Vec u = Vec::Zero(2);
  Vec w = Vec::Zero(2);
  double tau = 0.0;
  double separation = 0.3;
  double expectedSlope = 0.0;  // 0 selects the kind's default
};

struct TauSchedule {
  std::string mode = "fixed";  // "fixed" or "window"
  std::vector<double> values{0.0};
  double C = 0.0;  // window constant; 0 selects |τ|
};

struct ExperimentConfig {
  std::string model = "cp1";
  std::string hamiltonian = "rotation";
  std::map<std::string, double> params;
  double tau0 = 0.0;
  TauSchedule tau;
  std::vector<int> ks{32, 48, 64, 96, 128, 192, 256, 384, 512};
  std::vector<ProbeSpec> probes;
  int randomProbes = 0;
  double randomRadius = 1.0;
  SymbolSpec rho;
  double flowTol = 1e-10;
  double window = 1.0;  // E for the local kernel window
  double expectedSlope = -0.4;
  double exactTol = 0.0;  // > 0: every error must be below this instead of a slope test
  double errorFloor = 1e-12;
  std::string outCsv;
  std::string outJson;
  std::uint64_t seed = 1;
  bool seedGiven = false;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double halfWidth = 0.0;  // two-sided 95% t-interval
  int points = 0;
  double topHalfSlope = 0.0;
  bool stable = true;  // top-half slope within the half-width of the full slope
};

// Least squares of log(err) on log(k) with the smallest `drop` k removed.
FitResult fit_slope(const std::vector<int>& ks, const std::vector<double>& errs, int drop = 2);

struct ReportRow {
  int k = 0;
  double tau = 0.0;
  cplx measured{0.0, 0.0};
  cplx predicted{0.0, 0.0};
  double error = 0.0;
  double phaseDiff = 0.0;
  double exactError = -1.0;  // against a closed form, when one exists
  bool windowEdge = false;
};

struct SeriesReport {
  std::string label;
  std::string kind;
  std::vector<ReportRow> rows;
  FitResult fit;
  double expectedSlope = 0.0;
  bool monotone = false;
  bool pass = false;
};

struct ConvergenceReport {
  std::string experiment;
  ExperimentConfig config;
  std::vector<SeriesReport> series;
  bool pass = false;
};

ConvergenceReport run_kernel_scaling(const ExperimentConfig& cfg);
ConvergenceReport run_trace_fixed(const ExperimentConfig& cfg);
ConvergenceReport run_trace_rescaled(const ExperimentConfig& cfg);

std::string report_csv(const ConvergenceReport& r);
nlohmann::json report_json(const ConvergenceReport& r);
// Writes the CSV and JSON outputs named in the config, if any.
void write_outputs(const ConvergenceReport& r);

// Random symplectic matrix: exp(J₀S₁)·exp(J₀S₂) with symmetric S of norm ~ scale.
Mat random_symplectic(int d, std::mt19937_64& rng, double scale = 0.7);

// Property suites at reduced sizes; the report carries no timings so equal
// seeds give identical output.
nlohmann::json selftest(std::uint64_t seed);

}  // namespace btlab
