#pragma once

#include "btlab/common.hpp"
#include "btlab/dynamics.hpp"
#include "btlab/geometry.hpp"
#include "btlab/quantization.hpp"
#include "btlab/symplin.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace btlab {

// Everything the local kernel law needs at a base point m and period τ₀.
struct LocalProbeGeometry {
  double tau0 = 0.0;
  ReturnMap rm;
  double fm = 0.0;     // f(m)
  Vec upsilon;         // υ_f at m_{τ₀}, target frame
  PoincareData pd;
};

LocalProbeGeometry local_probe_geometry(const Hamiltonian& ham, const C2& x, double tau0, double tol = 1e-11);

struct LocalKernelPrediction {
  cplx value{0.0, 0.0};
  cplx phase{1.0, 0.0};   // e^{iτ√k f(m)}
  double amplitude = 0.0; // (2/ν)(k/π)ϱ
  cplx exponent{0.0, 0.0};
  cplx holonomyPower{1.0, 0.0};
  bool holonomyApplied = false;
};

struct LocalKernelOptions {
  double window = 1.0;     // E in ‖u‖,‖w‖,|τ| ≤ E k^{1/9}
  bool sameChart = false;  // w read in the source chart (multiplies by h^k)
};

// Leading term of U_{τ₀+τ/√k,k}(x + u/√k, x_{τ₀} + w/√k).
LocalKernelPrediction predict_local_kernel(const LocalProbeGeometry& g, double tau, const Vec& u, const Vec& w, int k,
                                           double rho = 1.0, const LocalKernelOptions& opt = {});

struct ComponentTerm {
  int component = -1;
  int critical = -1;  // -1 for fixed-time terms
  int da = 0;
  int dab = 0;
  cplx holonomyPower{1.0, 0.0};
  cplx coefficient{0.0, 0.0};  // F_{a0} or 𝒜_{ab00}
  cplx value{0.0, 0.0};
  int signature = 0;
  double fab = 0.0;
};

struct TracePrediction {
  cplx value{0.0, 0.0};
  std::vector<ComponentTerm> terms;
  int meshLevels = 0;
  int meshPoints = 0;
  std::vector<std::string> branchRecords;
};

struct MeshOptions {
  int initial = 16;
  int maxLevels = 7;
  double relTol = 1e-6;
  double tol = 1e-11;
};

// Theorem-level fixed-time leading term at the profile's τ₀. rho is the τ₀ slice.
TracePrediction predict_trace_fixed(const PeriodProfile& profile, const Hamiltonian& ham, const Symbol& rho, int k,
                                    const MeshOptions& opt = {});

// Rescaled leading term for U_{τ₀+τ/√k,k}; requires C k^{-1/9} < |τ| < C k^{1/9}.
TracePrediction predict_trace_rescaled(const PeriodProfile& profile, const Hamiltonian& ham, const Symbol& rho, int k,
                                       double tau, double C, const MeshOptions& opt = {});

// Bound of |k^{-l/2}(τ√k)^{-r} P(τ)| on the window, P of degree 3(l+r) with unit
// coefficients, obtained by bounding each monotone factor at the window ends.
struct TermMagnitude {
  double bound = 0.0;
  double reference = 0.0;  // k^{-s/18}
  double ratio = 0.0;
};
TermMagnitude term_magnitude(int l, int r, int k, double C);

nlohmann::json to_json(const LocalKernelPrediction& p);
nlohmann::json to_json(const TracePrediction& p);

}  // namespace btlab
