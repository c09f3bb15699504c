#include "btlab/oscillatory.hpp"

#include "btlab/symplin.hpp"
#include "poly.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace btlab {

using detail::Poly;

namespace {

// variables: 0 = t, 1 = θ, 2 = u, 3 = ϑ
Poly psi_poly(double tau, double fm) {
  Poly t = Poly::variable(4, 0), th = Poly::variable(4, 1), u = Poly::variable(4, 2),
       vt = Poly::variable(4, 3);
  return u * (Poly::constant(4, tau * fm) + th + vt) - t * th - vt;
}

long long det3(const IMat4& M, int skipRow, int skipCol) {
  long long a[3][3];
  for (int i = 0, r = 0; i < 4; ++i) {
    if (i == skipRow) continue;
    for (int j = 0, c = 0; j < 4; ++j) {
      if (j == skipCol) continue;
      a[r][c++] = M(i, j);
    }
    ++r;
  }
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

}  // namespace

long long integer_det(const IMat4& M) {
  long long d = 0;
  for (int j = 0; j < 4; ++j) d += ((j % 2) ? -1 : 1) * M(0, j) * det3(M, 0, j);
  return d;
}

double model_phase(double tau, double fm, const Eigen::Vector4d& p) {
  return p(2) * (tau * fm + p(1) + p(3)) - p(0) * p(1) - p(3);
}

Eigen::Vector4d model_phase_gradient(double tau, double fm, const Eigen::Vector4d& p) {
  Poly psi = psi_poly(tau, fm);
  Eigen::Vector4d g;
  for (int i = 0; i < 4; ++i) g(i) = psi.diff(i).eval(p);
  return g;
}

ModelPhaseData model_phase_data(double tau, double fm) {
  ModelPhaseData md;
  md.tau = tau;
  md.fm = fm;
  md.criticalPoint << 1.0, 0.0, 1.0, -tau * fm;
  Poly psi = psi_poly(tau, fm);
  Eigen::Matrix4d Hd;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double h = psi.diff(i).diff(j).eval(md.criticalPoint);
      md.hessian(i, j) = std::llround(h);
      Hd(i, j) = h;
    }
  long long det = integer_det(md.hessian);
  if (det != 1 && det != -1) throw ConsistencyError("model phase Hessian is not unimodular");
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) md.inverseHessian(i, j) = det * (((i + j) % 2) ? -1 : 1) * det3(md.hessian, j, i);
  md.detAbs = static_cast<double>(det < 0 ? -det : det);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(Hd);
  for (int i = 0; i < 4; ++i) md.signature += es.eigenvalues()(i) > 0 ? 1 : -1;
  md.psiAtCritical = model_phase(tau, fm, md.criticalPoint);
  return md;
}

GaussianIdentityInputs GaussianIdentityInputs::make(const Mat& QA, const Vec& G, const Vec& H, double F) {
  if (QA.rows() != QA.cols() || QA.rows() % 2 != 0 || G.size() != QA.rows() || H.size() != QA.rows())
    throw ArgumentError("gaussian inputs: dimension mismatch");
  Eigen::LLT<Mat> llt(QA);
  if (llt.info() != Eigen::Success) throw ValidationError("gaussian inputs: QA is not positive definite");
  return {QA, G, H, F, llt.solve(G)};
}

cplx gaussian_integrand(const GaussianIdentityInputs& in, const Vec& v) {
  return std::exp(cplx(-0.5 * in.F - 0.5 * v.dot(in.QA * v) + v.dot(in.G), -omega0(v, in.H)));
}

cplx gaussian_closed_form(const GaussianIdentityInputs& in) {
  const int c = static_cast<int>(in.QA.rows() / 2);
  Eigen::LLT<Mat> llt(in.QA);
  if (llt.info() != Eigen::Success) throw ValidationError("gaussian_closed_form: QA is not positive definite");
  Vec xi = J0(c) * in.H;
  double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  double re = -0.5 * in.F + 0.5 * in.r.dot(in.QA * in.r) - 0.5 * xi.dot(llt.solve(xi));
  return std::pow(2.0 * kPi, c) * std::exp(-0.5 * logdet) * std::exp(cplx(re, -omega0(in.r, in.H)));
}

cplx gaussian_moment(const Mat& QA, const Vec& H, const std::vector<int>& delta) {
  const int n = static_cast<int>(QA.rows());
  if (QA.cols() != n || n % 2 != 0 || H.size() != n || static_cast<int>(delta.size()) != n)
    throw ArgumentError("gaussian_moment: dimension mismatch");
  int deg = 0;
  for (int e : delta) {
    if (e < 0) throw ArgumentError("gaussian_moment: negative exponent");
    deg += e;
  }
  if (deg > 6) throw UnsupportedDegree("gaussian_moment: total degree " + std::to_string(deg) + " exceeds 6");
  Eigen::LLT<Mat> llt(QA);
  if (llt.info() != Eigen::Success) throw ValidationError("gaussian_moment: QA is not positive definite");
  Mat Sigma = llt.solve(Mat::Identity(n, n));

  // I(ξ) = (2π)^c det(Q)^{-1/2} exp(−½ξᵗΣξ); ∂_a (p I) = (∂_a p − (Σξ)_a p) I.
  std::vector<Poly> sxi;
  for (int a = 0; a < n; ++a) {
    Poly s(n);
    for (int b = 0; b < n; ++b) s = s + Poly::variable(n, b) * Sigma(a, b);
    sxi.push_back(s);
  }
  Poly p = Poly::constant(n, 1.0);
  for (int a = 0; a < n; ++a)
    for (int m = 0; m < delta[a]; ++m) p = p.diff(a) - sxi[a] * p;

  Vec xi = J0(n / 2) * H;
  double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  double I0 = std::pow(2.0 * kPi, n / 2) * std::exp(-0.5 * logdet - 0.5 * xi.dot(Sigma * xi));
  return std::pow(-kI, deg) * p.eval(xi) * I0;
}

cplx oscillatory_quadrature(const std::function<double(double)>& phase,
                            const std::function<cplx(double)>& amplitude, double a, double b,
                            double lambda, const OscillatoryOptions& opt) {
  if (!(b > a)) throw ArgumentError("oscillatory_quadrature: empty interval");
  if (lambda < 1.0) throw ArgumentError("oscillatory_quadrature: lambda must be >= 1");
  // Total phase variation over the box, from samples; the sampling is refined
  // until it resolves at most a quarter turn per sample.
  double var = 0.0;
  int n = opt.samples;
  for (;; n *= 2) {
    var = 0.0;
    double prev = phase(a);
    for (int i = 1; i <= n; ++i) {
      double cur = phase(a + (b - a) * i / n);
      var += std::abs(cur - prev);
      prev = cur;
    }
    if (lambda * var / n <= 0.5 * kPi) break;
    if (2L * n > opt.maxSamples) throw ResolutionError("oscillatory_quadrature: lambda too large for the sampling resolution");
  }
  double osc = lambda * var / (2.0 * kPi);
  long pieces = std::max<long>(1, static_cast<long>(std::ceil(osc / opt.maxOscillationsPerPiece)));
  if (pieces > opt.maxPieces) throw ResolutionError("oscillatory_quadrature: too many pieces for the requested lambda");

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  cplx total{0.0, 0.0};
  const double h = (b - a) / static_cast<double>(pieces);
  for (long p = 0; p < pieces; ++p) {
    double lo = a + h * p, hi = (p + 1 == pieces) ? b : a + h * (p + 1);
    double errRe = 0.0, errIm = 0.0;
    double re = GK::integrate([&](double x) { return (std::exp(kI * (lambda * phase(x))) * amplitude(x)).real(); },
                              lo, hi, opt.maxDepth, opt.relTol, &errRe);
    double im = GK::integrate([&](double x) { return (std::exp(kI * (lambda * phase(x))) * amplitude(x)).imag(); },
                              lo, hi, opt.maxDepth, opt.relTol, &errIm);
    total += cplx(re, im);
  }
  return total;
}

}  // namespace btlab
