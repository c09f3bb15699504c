#include "btlab/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace btlab {

namespace {

double rho(cplx z) {
  double q = 1.0 + std::norm(z);
  return 1.0 / (q * q);
}

Mat stdOmega(int d) { return -J0(d); }

}  // namespace

Mat KahlerModel::metricAt(int, cplx z) const { return rho(z) * Mat::Identity(2, 2); }

Mat KahlerModel::omegaAt(int, cplx z) const {
  Mat W(2, 2);
  W << 0.0, 1.0, -1.0, 0.0;
  return rho(z) * W;
}

Mat KahlerModel::complexStructureAt(int, cplx) const { return J0(1); }

double KahlerModel::kahlerPotential(int, cplx z) const { return std::log1p(std::norm(z)); }

double KahlerModel::volumeDensityAt(int, cplx z) const { return rho(z); }

cplx KahlerModel::transition(int from, int to, cplx z) const {
  if (from == to) return z;
  if (z == cplx(0.0, 0.0)) throw ArgumentError("chart transition at the seam");
  return 1.0 / z;
}

cplx KahlerModel::transitionCocycle(int from, int to, cplx z) const {
  if (from == to) return {1.0, 0.0};
  if (z == cplx(0.0, 0.0)) throw ArgumentError("chart transition at the seam");
  return z / std::abs(z);
}

KahlerModel cp1_model() { return KahlerModel{}; }

CirclePoint CirclePoint::fromC2(const C2& Zin) {
  C2 Z = Zin / Zin.norm();
  CirclePoint p;
  if (std::abs(Z(0)) >= std::abs(Z(1))) {
    p.frameId = 0;
    p.z = Z(1) / Z(0);
    p.fiberPhase = std::arg(Z(0));
  } else {
    p.frameId = 1;
    p.z = Z(0) / Z(1);
    p.fiberPhase = std::arg(Z(1));
  }
  return p;
}

C2 CirclePoint::toC2() const {
  double n = std::sqrt(1.0 + std::norm(z));
  cplx e = std::polar(1.0, fiberPhase) / n;
  return frameId == 0 ? C2(e, e * z) : C2(e * z, e);
}

CirclePoint CirclePoint::inFrame(int frame) const {
  if (frame == frameId) return *this;
  C2 Z = toC2();
  cplx lead = frame == 0 ? Z(0) : Z(1);
  if (std::abs(lead) < 1e-300) throw ArgumentError("point lies on the seam of the requested frame");
  CirclePoint p;
  p.frameId = frame;
  p.z = frame == 0 ? Z(1) / Z(0) : Z(0) / Z(1);
  p.fiberPhase = std::arg(lead);
  return p;
}

Eigen::Vector3d c2_to_bloch(const C2& Z) {
  cplx c = std::conj(Z(0)) * Z(1);
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(Z(0)) - std::norm(Z(1))};
}

C2 bloch_to_c2(const Eigen::Vector3d& nin) {
  Eigen::Vector3d n = nin / nin.norm();
  cplx w(n(0), n(1));
  if (n(2) >= 0.0) {
    double a = std::sqrt(0.5 * (1.0 + n(2)));
    return {a, w / (2.0 * a)};
  }
  double b = std::sqrt(0.5 * (1.0 - n(2)));
  return {std::conj(w) / (2.0 * b), b};
}

Eigen::Vector3d CirclePoint::bloch() const { return c2_to_bloch(toC2()); }

CirclePoint CirclePoint::rotated(double theta) const {
  CirclePoint p = *this;
  p.fiberPhase = std::remainder(fiberPhase + theta, 2.0 * kPi);
  return p;
}

HeisenbergChart::HeisenbergChart(const U2& U) : U_(U) {}

HeisenbergChart::HeisenbergChart(const CirclePoint& c, bool verify) {
  C2 X = c.toC2();
  U_ << X(0), -std::conj(X(1)), X(1), std::conj(X(0));
  if (verify) {
    Residuals r = residuals();
    if (r.metric > 1e-6 || r.omega > 1e-6 || r.complexStructure > 1e-6 || r.translation > 1e-6 ||
        std::abs(r.alphaCoefficient - 1.0) > 1e-6 || std::abs(r.alphaDtheta - 1.0) > 1e-6)
      throw ConsistencyError("Heisenberg chart failed its normal-form checks");
  }
}

HeisenbergChart HeisenbergChart::fromUnitary(const U2& U, bool verify) {
  if ((U.adjoint() * U - U2::Identity()).norm() > 1e-10) throw ArgumentError("chart frame must be unitary");
  HeisenbergChart h(U);
  if (verify) {
    Residuals r = h.residuals();
    if (r.metric > 1e-6 || r.omega > 1e-6 || r.complexStructure > 1e-6)
      throw ConsistencyError("Heisenberg chart failed its normal-form checks");
  }
  return h;
}

C2 HeisenbergChart::mapC2(double theta, const Vec& v) const {
  cplx z(v(0), v(1));
  C2 q(1.0, z);
  return std::polar(1.0 / std::sqrt(1.0 + std::norm(z)), theta) * (U_ * q);
}

std::pair<double, Vec> HeisenbergChart::inverse(const C2& Z) const {
  C2 W = U_.adjoint() * Z;
  if (std::abs(W(0)) < 1e-300) throw ArgumentError("point on the antipodal fiber of the chart center");
  cplx z = W(1) / W(0);
  Vec v(2);
  v << z.real(), z.imag();
  return {std::arg(W(0)), v};
}

C2 HeisenbergChart::tangent(const Vec& v) const { return U_.col(1) * cplx(v(0), v(1)); }

HeisenbergChart HeisenbergChart::translated(double theta) const { return HeisenbergChart(std::polar(1.0, theta) * U_); }

HeisenbergChart::Residuals HeisenbergChart::residuals(double h) const {
  auto at = [&](double th, double a, double b) {
    Vec v(2);
    v << a, b;
    return mapC2(th, v);
  };
  // five-point derivatives of the chart map at (θ, v)
  auto dv = [&](int j, double th, double a, double b) {
    double ea = j == 0 ? h : 0.0, eb = j == 1 ? h : 0.0;
    return C2((-at(th, a + 2 * ea, b + 2 * eb) + 8.0 * at(th, a + ea, b + eb) - 8.0 * at(th, a - ea, b - eb) +
               at(th, a - 2 * ea, b - 2 * eb)) /
              (12.0 * h));
  };
  auto dth = [&](double th, double a, double b) {
    return C2((-at(th + 2 * h, a, b) + 8.0 * at(th + h, a, b) - 8.0 * at(th - h, a, b) + at(th - 2 * h, a, b)) /
              (12.0 * h));
  };
  C2 Z = at(0, 0, 0);
  C2 d[2];
  for (int j = 0; j < 2; ++j) {
    C2 t = dv(j, 0, 0, 0);
    d[j] = t - (Z.dot(t)) * Z;  // horizontal part
  }
  Mat g(2, 2), w(2, 2), J(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cplx ip = d[i].dot(d[j]);  // Σ conj(d_i) d_j
      g(i, j) = ip.real();
      w(i, j) = ip.imag();
      J(i, j) = d[i].dot(kI * d[j]).real();
    }
  Residuals r;
  r.metric = (g - Mat::Identity(2, 2)).norm();
  r.omega = (w - stdOmega(1)).norm();
  r.complexStructure = (J - J0(1)).norm();
  {
    Vec v(2);
    v << 0.11, -0.07;
    r.translation = (mapC2(0.3 + 0.5, v) - std::polar(1.0, 0.5) * mapC2(0.3, v)).norm();
  }
  auto alpha = [&](int j, double a, double b) {
    C2 P = at(0, a, b);
    return P.dot(dv(j, 0, a, b)).imag();
  };
  r.alphaCoefficient = (alpha(1, h, 0) - alpha(1, -h, 0) - alpha(0, 0, h) + alpha(0, 0, -h)) / (4.0 * h);
  r.alphaDtheta = Z.dot(dth(0, 0, 0)).imag();
  return r;
}

double dist_M(const C2& a, const C2& b) {
  // atan2 form stays accurate near 0 and π/2
  const double wedge = std::abs(a(0) * b(1) - a(1) * b(0));
  return std::atan2(wedge, std::abs(b.dot(a)));
}

double dist_X(const C2& a, const C2& b) {
  const C2 an = a / a.norm(), bn = b / b.norm();
  return 2.0 * std::asin(std::min(1.0, 0.5 * (an - bn).norm()));
}

double dist_M(const CirclePoint& a, const CirclePoint& b) { return dist_M(a.toC2(), b.toC2()); }
double dist_X(const CirclePoint& a, const CirclePoint& b) { return dist_X(a.toC2(), b.toC2()); }

SubspaceVolumeData zeta_subspace(const Mat& B, const Mat& gIn, const Mat& WIn, double tol) {
  const int n = static_cast<int>(B.rows());
  if (n % 2 != 0 || B.cols() % 2 != 0) throw ArgumentError("zeta_subspace: dimensions must be even");
  Mat g = gIn.size() ? gIn : Mat::Identity(n, n);
  Mat W = WIn.size() ? WIn : stdOmega(n / 2);
  const int c = static_cast<int>(B.cols() / 2);
  Mat Om = B.transpose() * W * B;
  if ((Om - stdOmega(c)).norm() > tol * std::max(1.0, B.squaredNorm()))
    throw ValidationError("zeta_subspace: basis is not Darboux");
  return {1.0 / std::sqrt((B.transpose() * g * B).determinant())};
}

Mat darboux_basis(const Mat& vectors, const Mat& WIn) {
  const int n = static_cast<int>(vectors.rows());
  Mat W = WIn.size() ? WIn : stdOmega(n / 2);
  std::vector<Vec> pool;
  for (int j = 0; j < vectors.cols(); ++j) pool.push_back(vectors.col(j));
  std::vector<Vec> es, fs;
  auto om = [&](const Vec& a, const Vec& b) { return a.dot(W * b); };
  while (!pool.empty()) {
    // pick the pair with the largest pairing for stability
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j)
        if (std::abs(om(pool[i], pool[j])) > best) {
          best = std::abs(om(pool[i], pool[j]));
          bi = i;
          bj = j;
        }
    if (pool.size() < 2 || best < 1e-12) throw ValidationError("darboux_basis: span is not symplectic");
    Vec e = pool[bi], f = pool[bj];
    double s = std::sqrt(std::abs(om(e, f)));
    e /= s;
    f *= (om(e, f) > 0 ? 1.0 : -1.0) / s;
    std::vector<Vec> rest;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (i == bi || i == bj) continue;
      Vec v = pool[i];
      rest.push_back(v + om(v, e) * f - om(v, f) * e);
    }
    pool = rest;
    es.push_back(e);
    fs.push_back(f);
  }
  Mat out(n, 2 * es.size());
  for (std::size_t i = 0; i < es.size(); ++i) {
    out.col(i) = es[i];
    out.col(es.size() + i) = fs[i];
  }
  return out;
}

Mat symplectic_complement(const Mat& vectors, const Mat& WIn) {
  const int n = static_cast<int>(vectors.rows());
  Mat W = WIn.size() ? WIn : stdOmega(n / 2);
  Mat C = vectors.transpose() * W;
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
  int r = 0;
  const Vec& s = svd.singularValues();
  while (r < s.size() && s(r) > 1e-12 * std::max(1.0, s(0))) ++r;
  return svd.matrixV().rightCols(n - r);
}

}  // namespace btlab
