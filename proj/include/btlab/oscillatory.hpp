#pragma once

#include "btlab/common.hpp"

#include <functional>

namespace btlab {

using IMat4 = Eigen::Matrix<long long, 4, 4>;

// Ψ_τ(t,θ,u,ϑ) = u(τ·f(m) + θ + ϑ) − tθ − ϑ
struct ModelPhaseData {
  double tau = 0.0;
  double fm = 0.0;
  Eigen::Vector4d criticalPoint;
  IMat4 hessian;
  IMat4 inverseHessian;
  int signature = 0;
  double detAbs = 0.0;
  double psiAtCritical = 0.0;
};

double model_phase(double tau, double fm, const Eigen::Vector4d& p);
Eigen::Vector4d model_phase_gradient(double tau, double fm, const Eigen::Vector4d& p);
ModelPhaseData model_phase_data(double tau, double fm);

long long integer_det(const IMat4& M);

struct GaussianIdentityInputs {
  Mat QA;
  Vec G;
  Vec H;
  double F = 0.0;
  Vec r;  // QA⁻¹ G

  static GaussianIdentityInputs make(const Mat& QA, const Vec& G, const Vec& H, double F);
};

// exp(−F/2 − iω₀(v,H) − ½vᵗQ_A v + vᵗG): the Gaussian exponent with the outer
// phase e^{iτω(υ_f,w)} removed.
cplx gaussian_integrand(const GaussianIdentityInputs& in, const Vec& v);
// Its integral over R^{2c}.
cplx gaussian_closed_form(const GaussianIdentityInputs& in);

// ∫ s^δ exp(−iω₀(s,H) − ½sᵗQ_A s) ds, |δ| ≤ 6.
cplx gaussian_moment(const Mat& QA, const Vec& H, const std::vector<int>& delta);

struct OscillatoryOptions {
  double relTol = 1e-11;
  int maxDepth = 5;  // pieces that cancel cannot meet a relative tolerance; cap the recursion
  int samples = 2048;  // initial sampling for the oscillation-count check
  long maxSamples = 1L << 20;
  double maxOscillationsPerPiece = 1.0;
  long maxPieces = 200000;
};

// ∫_a^b e^{iλφ(x)} a(x) dx by piecewise adaptive Gauss–Kronrod.
cplx oscillatory_quadrature(const std::function<double(double)>& phase,
                            const std::function<cplx(double)>& amplitude, double a, double b,
                            double lambda, const OscillatoryOptions& opt = {});

}  // namespace btlab
