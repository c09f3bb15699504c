#pragma once

#include "btlab/common.hpp"
#include "btlab/geometry.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace btlab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// A Hamiltonian on CP¹ written as a function of the Bloch vector n = Z†σZ.
// The Hamiltonian field is fixed by 2ω(υ_f, ·) = df, which is the
// normalization under which υ_f^♯ − f∂_θ preserves α = Im(Z̄·dZ).
struct Hamiltonian {
  std::string name;
  std::function<double(const Vec3&)> f;
  std::function<Vec3(const Vec3&)> grad;
  std::function<Mat3(const Vec3&)> hess;
  bool compatible = false;
  // f = Z†HZ for compatible (linear in n) Hamiltonians.
  std::optional<U2> generator;
  std::map<std::string, double> params;

  double value(const C2& Z) const { return f(c2_to_bloch(Z)); }
};

// f = c0 + b·n + nᵀCn.
Hamiltonian quadratic_hamiltonian(const std::string& name, double c0, const Vec3& b, const Mat3& C);
// Registry: "rotation" {frequency=1, offset=0}, "perturbed-rotation" {epsilon=0.3},
// "quadratic" {c0, b0..b2, C00..C22}.
Hamiltonian make_hamiltonian(const std::string& id, const std::map<std::string, double>& params = {});
Hamiltonian custom_hamiltonian(const std::string& name, std::function<double(const Vec3&)> f,
                               std::function<Vec3(const Vec3&)> grad, std::function<Mat3(const Vec3&)> hess);

// Contact vector field on C² (restricted to S³).
C2 contact_field(const Hamiltonian& ham, const C2& Z);
// υ_f at the center of a chart, in the chart's frame.
Vec hamiltonian_field(const Hamiltonian& ham, const HeisenbergChart& chart);

struct FlowOptions {
  double tol = 1e-10;
  bool trackPhase = false;
  long maxSteps = 1000000;
};

struct ContactTrajectory {
  C2 start;
  C2 end;
  C2 tangentEnd[2];
  bool hasTangents = false;
  double accumulatedPhase = 0.0;
  long steps = 0;
};

// Integrates ṽ_f (and optionally its variational equation on two tangent
// vectors) for time tau with adaptive Dormand–Prince.
ContactTrajectory integrate_contact(const Hamiltonian& ham, const C2& Z, double tau, const C2* tangents,
                                    const FlowOptions& opt = {});
// e^{−iτH}Z for compatible Hamiltonians.
C2 exact_contact_flow(const Hamiltonian& ham, const C2& Z, double tau);

struct FlowResult {
  C2 start;
  C2 end;
  Mat differential;  // 2×2, Heisenberg frames at start and end
  double tau = 0.0;
  long steps = 0;
};

// Base flow φ^M_τ with its differential. Frames: canonical chart at the start
// point; at the end, the chart translated from the start chart when the end
// lies on the start fiber, else the canonical chart at the end point.
FlowResult flow(const Hamiltonian& ham, const C2& Z, double tau, double tol = 1e-10);

struct ContactLiftResult {
  CirclePoint end;
  C2 endC2;
  double accumulatedPhase = 0.0;
};

ContactLiftResult contact_lift(const Hamiltonian& ham, const CirclePoint& x, double tau, double tol = 1e-10);

// Chart at x_τ₀ matching the convention used for the matrix A.
HeisenbergChart target_chart(const HeisenbergChart& source, const C2& xt, double sameFiberTol = 1e-9);

// A = d_mφ^M_{−τ₀} in Heisenberg frames at x and x_{τ₀} = φ^X_{−τ₀}(x).
struct ReturnMap {
  C2 x;
  C2 xt;
  HeisenbergChart source;
  HeisenbergChart target;
  Mat A;
  bool sameFiber = false;
  cplx holonomy{1.0, 0.0};  // ⟨x_{τ₀}, x⟩ when on the same fiber
};

ReturnMap return_map(const Hamiltonian& ham, const C2& x, double tau0, double tol = 1e-10);

struct CriticalData {
  C2 point;
  int dim2 = 0;
  double fab = 0.0;
  Mat transverseHessian;
  double detAbs = 1.0;
  int signature = 0;
  double fieldNorm = 0.0;  // ‖υ_f(q)‖, zero by Lemma-type identity
};

struct FixedComponent {
  bool wholeManifold = false;
  std::vector<C2> samples;
  int dim2 = 0;
  cplx holonomy{1.0, 0.0};
  double holonomySpread = 0.0;
  std::vector<CriticalData> critical;
};

struct PeriodProfile {
  double tau0 = 0.0;
  std::vector<FixedComponent> components;
  bool clean = false;
  bool veryClean = false;
  bool morseBott = false;
};

struct ClassifyOptions {
  int gridSize = 400;
  double tol = 1e-11;  // integration tolerance
  double fixedThreshold = 1e-7;  // relative to the diameter
  double movedThreshold = 1e-4;
};

// Critical points of f on M by grid search and Newton refinement.
std::vector<C2> critical_points(const Hamiltonian& ham, int grid = 2000);
// Hessian of f at a critical point, in the orthonormal chart frame.
Mat hessian_at(const Hamiltonian& ham, const C2& q);

PeriodProfile classify_period(const Hamiltonian& ham, double tau0, const ClassifyOptions& opt = {});

// Fibonacci sample of the sphere as unit lifts.
std::vector<C2> sphere_grid(int n);

}  // namespace btlab
