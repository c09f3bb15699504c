#include "btlab/symplin.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace btlab {

SymplecticMap SymplecticMap::make(const Mat& A, double eps) {
  if (A.rows() != A.cols() || A.rows() % 2 != 0 || A.rows() == 0)
    throw ArgumentError("symplectic map must be a non-empty square matrix of even size");
  SymplecticMap m{static_cast<int>(A.rows() / 2), A};
  if (!std::isfinite(A.norm())) throw ValidationError("symplectic map has non-finite entries");
  double res = m.residual();
  if (res > eps) throw ValidationError("matrix is not symplectic (residual " + std::to_string(res) + ")");
  if (std::abs(A.determinant() - 1.0) > eps * std::max(1.0, A.squaredNorm()))
    throw ValidationError("symplectic matrix must have determinant 1");
  return m;
}

double SymplecticMap::residual() const {
  Mat J = J0(d);
  return (A.transpose() * J * A - J).norm() / std::max(1.0, A.squaredNorm());
}

double omega0(const Vec& r, const Vec& s) {
  if (r.size() != s.size() || r.size() % 2 != 0)
    throw ArgumentError("omega0: vectors must have matching even dimension");
  return -r.dot(J0(static_cast<int>(r.size() / 2)) * s);
}

PolarFactors polar_decompose(const SymplecticMap& A) {
  Mat M = A.A.transpose() * A.A;
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  Vec lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0) throw ValidationError("polar_decompose: singular input");
  Mat V = es.eigenvectors();
  Vec s = lam.array().sqrt();
  PolarFactors pf;
  pf.P = V * s.asDiagonal() * V.transpose();
  pf.O = A.A * (V * s.cwiseInverse().asDiagonal() * V.transpose());
  return pf;
}

PoincareData poincare_data(const SymplecticMap& A) {
  const int n = 2 * A.d;
  PolarFactors pf = polar_decompose(A);
  Mat I = Mat::Identity(n, n);
  Mat P2 = pf.P * pf.P;
  PoincareData pd;
  pd.QA = I + P2;
  Mat Qi = pd.QA.inverse();
  pd.PA = pf.O * Qi * pf.O.transpose();
  pd.RA = pf.O * (I - P2) * Qi * J0(A.d) * pf.O.transpose();
  pd.nuA = std::sqrt(pd.QA.determinant());
  return pd;
}

QuadraticFormS::QuadraticFormS(SymplecticMap A) : A_(std::move(A)), pd_(poincare_data(A_)) {
  kernel_ = pd_.PA.cast<cplx>() + cplx(0.0, 0.5) * pd_.RA.cast<cplx>();
}

cplx QuadraticFormS::S(const Vec& u, const Vec& w) const {
  if (u.size() != 2 * A_.d || w.size() != 2 * A_.d) throw ArgumentError("eval_S: dimension mismatch");
  Vec Au = A_.A * u;
  CVec L = (Au - w).cast<cplx>();
  cplx quad = (L.transpose() * kernel_ * L)(0, 0);
  return -quad - kI * omega0(Au, w);
}

cplx eval_S(const QuadraticFormS& form, const Vec& u, const Vec& w) { return form.S(u, w); }
cplx eval_Qform(const QuadraticFormS& form, const Vec& v) { return form.Q(v); }

Splitting symplectic_splitting(const SymplecticMap& A, double tol) {
  const int n = 2 * A.d;
  Mat M = Mat::Identity(n, n) - A.A;
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec s = svd.singularValues();
  if (tol < 0) tol = std::max(1e-6 * s(0), 1e-12);
  int r = 0;
  while (r < n && s(r) > tol) ++r;
  Splitting out;
  out.im = svd.matrixU().leftCols(r);
  out.ker = svd.matrixV().rightCols(n - r);
  Mat both(n, n);
  both << out.ker, out.im;
  Eigen::JacobiSVD<Mat> chk(both);
  out.veryClean = chk.singularValues()(n - 1) > 1e-6;
  return out;
}

cplx det_sqrt(const CMat& M) {
  if (M.rows() == 0) return {1.0, 0.0};
  Eigen::ComplexEigenSolver<CMat> es(M, false);
  cplx p{1.0, 0.0};
  for (int i = 0; i < es.eigenvalues().size(); ++i) p *= std::sqrt(es.eigenvalues()(i));
  return p;
}

cplx det_sqrt_tracked(const CMat& M, cplx anchor) {
  if (M.rows() == 0) return {1.0, 0.0};
  cplx s = std::sqrt(M.determinant());
  return std::abs(s - anchor) <= std::abs(s + anchor) ? s : -s;
}

NormalQuadraticForm restrict_Q_normal(const QuadraticFormS& form, const Mat& imBasis) {
  const int m = static_cast<int>(imBasis.cols());
  NormalQuadraticForm nq;
  nq.subspaceBasis = imBasis;
  nq.matrix = CMat::Zero(m, m);
  if (m == 0) return nq;
  std::vector<cplx> diag(m);
  for (int i = 0; i < m; ++i) diag[i] = form.Q(imBasis.col(i));
  for (int i = 0; i < m; ++i) {
    nq.matrix(i, i) = diag[i];
    for (int j = i + 1; j < m; ++j) {
      cplx q = 0.5 * (form.Q(imBasis.col(i) + imBasis.col(j)) - diag[i] - diag[j]);
      nq.matrix(i, j) = q;
      nq.matrix(j, i) = q;
    }
  }
  Mat re = nq.matrix.real();
  nq.minRealEig = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (re + re.transpose())).eigenvalues()(0);
  if (!(nq.minRealEig > 0.0)) throw ValidationError("not very clean at this point: Re Q is not positive on the normal space");
  nq.detSqrt = det_sqrt(nq.matrix);
  return nq;
}

}  // namespace btlab
