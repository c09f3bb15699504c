#pragma once

#include "btlab/common.hpp"

namespace btlab {

struct SymplecticMap {
  int d = 0;
  Mat A;

  // Validates AᵗJ₀A = J₀ and det A = 1 to relative tolerance eps.
  static SymplecticMap make(const Mat& A, double eps = 1e-8);
  double residual() const;  // ‖AᵗJ₀A − J₀‖ / max(1, ‖A‖²)
};

struct PolarFactors {
  Mat O;
  Mat P;
};

struct PoincareData {
  Mat QA;
  Mat PA;
  Mat RA;
  double nuA = 0.0;
};

double omega0(const Vec& r, const Vec& s);

PolarFactors polar_decompose(const SymplecticMap& A);
PoincareData poincare_data(const SymplecticMap& A);

class QuadraticFormS {
 public:
  explicit QuadraticFormS(SymplecticMap A);

  const SymplecticMap& map() const { return A_; }
  const PoincareData& data() const { return pd_; }

  cplx S(const Vec& u, const Vec& w) const;
  cplx Q(const Vec& v) const { return -S(v, v); }

 private:
  SymplecticMap A_;
  PoincareData pd_;
  CMat kernel_;  // P_A + (i/2) R_A
};

cplx eval_S(const QuadraticFormS& form, const Vec& u, const Vec& w);
cplx eval_Qform(const QuadraticFormS& form, const Vec& v);

struct Splitting {
  Mat ker;  // columns: orthonormal basis of ker(I − A)
  Mat im;   // columns: orthonormal basis of im(I − A)
  bool veryClean = false;
};

// tol < 0 selects the default 1e-6·‖I − A‖ (absolute 1e-12 floor).
Splitting symplectic_splitting(const SymplecticMap& A, double tol = -1.0);

struct NormalQuadraticForm {
  Mat subspaceBasis;
  CMat matrix;
  cplx detSqrt{1.0, 0.0};
  double minRealEig = 0.0;
};

NormalQuadraticForm restrict_Q_normal(const QuadraticFormS& form, const Mat& imBasis);

// Product of principal square roots of the eigenvalues.
cplx det_sqrt(const CMat& M);
// Same, with the overall sign chosen nearest to `anchor` (branch tracking).
cplx det_sqrt_tracked(const CMat& M, cplx anchor);

}  // namespace btlab
