#pragma once

#include "btlab/common.hpp"

#include <utility>

namespace btlab {

using C2 = Eigen::Vector2cd;
using U2 = Eigen::Matrix2cd;

// CP¹ with ω = dx∧dy/(1+|z|²)² in each affine chart, so ∫_M ω = π and the
// hyperplane bundle has curvature −2iω. X = S³ ⊂ C², the circle acts by
// scalar multiplication and α = Im(Z̄·dZ), so dα = 2π*ω.
struct KahlerModel {
  int d = 1;

  double totalSymplecticVolume() const { return kPi; }
  double diameter() const { return 0.5 * kPi; }

  // Chart 0: z = Z1/Z0. Chart 1: z = Z0/Z1.
  Mat metricAt(int chart, cplx z) const;
  Mat omegaAt(int chart, cplx z) const;  // ω(a,b) = aᵗ W b
  Mat complexStructureAt(int chart, cplx z) const;
  double kahlerPotential(int chart, cplx z) const;
  double volumeDensityAt(int chart, cplx z) const;

  // Coordinate change chart `from` → chart `to` and the fiber multiplier
  // c with e^{iθ_to} = c·e^{iθ_from}.
  cplx transition(int from, int to, cplx z) const;
  cplx transitionCocycle(int from, int to, cplx z) const;
};

KahlerModel cp1_model();

struct CirclePoint {
  int frameId = 0;
  cplx z{0.0, 0.0};
  double fiberPhase = 0.0;

  static CirclePoint fromC2(const C2& Z);
  C2 toC2() const;
  CirclePoint inFrame(int frame) const;
  Eigen::Vector3d bloch() const;  // n = Z†σZ ∈ S²
  CirclePoint rotated(double theta) const;  // circle action r_θ
};

C2 bloch_to_c2(const Eigen::Vector3d& n);  // a unit lift with real non-negative first nonzero entry
Eigen::Vector3d c2_to_bloch(const C2& Z);

class HeisenbergChart {
 public:
  struct Residuals {
    double metric = 0.0;
    double omega = 0.0;
    double complexStructure = 0.0;
    double translation = 0.0;
    double alphaCoefficient = 0.0;  // c in α = dθ + c(v₁dv₂ − v₂dv₁) + O(‖v‖²)
    double alphaDtheta = 0.0;
  };

  // Centered at (1,0).
  HeisenbergChart() : U_(U2::Identity()) {}
  explicit HeisenbergChart(const CirclePoint& center, bool verify = true);
  static HeisenbergChart fromUnitary(const U2& U, bool verify = true);

  CirclePoint center() const { return CirclePoint::fromC2(U_.col(0)); }
  const U2& unitary() const { return U_; }
  double radius() const { return radius_; }

  C2 mapC2(double theta, const Vec& v) const;
  CirclePoint map(double theta, const Vec& v) const { return CirclePoint::fromC2(mapC2(theta, v)); }
  // (θ, v) with chart(θ, v) = Z, for Z off the antipodal fiber.
  std::pair<double, Vec> inverse(const C2& Z) const;
  // Tangent vector at the center corresponding to v in the induced frame.
  C2 tangent(const Vec& v) const;
  // Chart centered at r_θ(center) whose map is r_θ ∘ this chart.
  HeisenbergChart translated(double theta) const;

  Residuals residuals(double h = 1e-4) const;

 private:
  explicit HeisenbergChart(const U2& U);
  U2 U_;
  double radius_ = 0.5;
};

double dist_M(const CirclePoint& a, const CirclePoint& b);
double dist_X(const CirclePoint& a, const CirclePoint& b);
double dist_M(const C2& a, const C2& b);
double dist_X(const C2& a, const C2& b);

struct SubspaceVolumeData {
  double zeta = 1.0;
};

// basis columns (e₁..e_c, f₁..f_c) must be Darboux for ω(a,b) = aᵗWb.
// Defaults: g = I, W = standard ω₀ on R^{2d}.
SubspaceVolumeData zeta_subspace(const Mat& basis, const Mat& g = Mat(), const Mat& W = Mat(), double tol = 1e-9);

// Symplectic Gram–Schmidt of the span of `vectors` (2c columns, symplectic span).
Mat darboux_basis(const Mat& vectors, const Mat& W = Mat());
// Basis of the ω-orthocomplement of span(vectors).
Mat symplectic_complement(const Mat& vectors, const Mat& W = Mat());

}  // namespace btlab
