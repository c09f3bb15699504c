#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btlab/geometry.hpp"

#include <boost/math/tools/minima.hpp>

#include <random>

using namespace btlab;

namespace {

C2 rand_point(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  C2 Z(cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)));
  return Z / Z.norm();
}

}  // namespace

TEST_CASE("model structure") {
  KahlerModel M = cp1_model();
  CHECK(M.d == 1);
  CHECK(M.totalSymplecticVolume() == doctest::Approx(kPi));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ud(-2.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int ch = t % 2;
    cplx z(ud(rng), ud(rng));
    Mat g = M.metricAt(ch, z), W = M.omegaAt(ch, z), J = M.complexStructureAt(ch, z);
    // g(a,b) = ω(a, Jb)
    worst = std::max(worst, (g - W * J).norm() / g.norm());
    worst = std::max(worst, (J.transpose() * g * J - g).norm() / g.norm());
    worst = std::max(worst, (J * J + Mat::Identity(2, 2)).norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("symplectic area by direct quadrature") {
  // ∫ ω over chart 0 in polar coordinates: 2π ∫ r dr / (1+r²)²
  KahlerModel M = cp1_model();
  double s = 0.0;
  const int n = 20000;
  const double R = 2000.0;
  for (int i = 0; i < n; ++i) {
    double t = (i + 0.5) / n;  // r = R t² clusters nodes at the origin
    double r = R * t * t, dr = 2 * R * t / n;
    s += 2 * kPi * r * M.volumeDensityAt(0, cplx(r, 0.0)) * dr;
  }
  CHECK(s == doctest::Approx(kPi).epsilon(1e-5));
}

TEST_CASE("transition cocycle has unit modulus and composes") {
  KahlerModel M = cp1_model();
  std::mt19937_64 rng(2);
  for (int t = 0; t < 40; ++t) {
    C2 Z = rand_point(rng);
    cplx z0 = Z(1) / Z(0);
    CHECK(std::abs(std::abs(M.transitionCocycle(0, 1, z0)) - 1.0) < 1e-12);
    cplx z1 = M.transition(0, 1, z0);
    CHECK(std::abs(z1 - Z(0) / Z(1)) < 1e-12 * std::max(1.0, std::abs(z1)));
    CHECK(std::abs(M.transitionCocycle(1, 0, z1) * M.transitionCocycle(0, 1, z0) - 1.0) < 1e-12);
    CirclePoint p = CirclePoint::fromC2(Z);
    CirclePoint q = p.inFrame(1 - p.frameId);
    CHECK((q.toC2() - Z).norm() < 1e-12);
  }
}

TEST_CASE("circle points and bloch vectors") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 40; ++t) {
    C2 Z = rand_point(rng);
    CirclePoint p = CirclePoint::fromC2(Z);
    CHECK((p.toC2() - Z).norm() < 1e-12);
    Eigen::Vector3d n = c2_to_bloch(Z);
    CHECK(n.norm() == doctest::Approx(1.0));
    C2 W = bloch_to_c2(n);
    CHECK(std::abs(std::abs(W.dot(Z)) - 1.0) < 1e-12);
    CHECK((p.rotated(0.4).toC2() - std::polar(1.0, 0.4) * Z).norm() < 1e-12);
  }
  CHECK((c2_to_bloch(C2(1.0, 0.0)) - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("Heisenberg charts") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    C2 Z = rand_point(rng);
    HeisenbergChart ch(CirclePoint::fromC2(Z));
    CHECK((ch.mapC2(0.0, Vec::Zero(2)) - Z).norm() < 1e-12);
    auto r = ch.residuals();
    CHECK(r.metric < 1e-8);
    CHECK(r.omega < 1e-8);
    CHECK(r.complexStructure < 1e-8);
    CHECK(r.translation < 1e-12);
    CHECK(std::abs(r.alphaCoefficient - 1.0) < 1e-6);
    CHECK(std::abs(r.alphaDtheta - 1.0) < 1e-6);
    Vec v(2);
    v << 0.1, -0.2;
    C2 Y = ch.mapC2(0.3, v);
    auto inv = ch.inverse(Y);
    CHECK(std::abs(inv.first - 0.3) < 1e-12);
    CHECK((inv.second - v).norm() < 1e-12);
    CHECK((ch.mapC2(0.3 + 0.5, v) - std::polar(1.0, 0.5) * Y).norm() < 1e-12);
    // two centers on one fiber: base charts differ by a unitary map
    HeisenbergChart tr = ch.translated(0.7);
    CHECK((tr.mapC2(0.0, v) - std::polar(1.0, 0.7) * ch.mapC2(0.0, v)).norm() < 1e-12);
  }
}

TEST_CASE("distances") {
  C2 a(1.0, 0.0), b(0.0, 1.0);
  CHECK(dist_M(a, a) == 0.0);
  CHECK(dist_M(a, b) == doctest::Approx(0.5 * kPi));
  CHECK(cp1_model().diameter() == doctest::Approx(0.5 * kPi));
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    C2 x = rand_point(rng), y = rand_point(rng);
    // min over the fiber of x, found by a bracketing minimizer
    auto res = boost::math::tools::brent_find_minima(
        [&](double th) { return dist_X(y, C2(std::polar(1.0, th) * x)); }, -kPi, kPi, 52);
    double m = res.second;
    for (double th = -kPi; th < kPi; th += 0.05) m = std::min(m, dist_X(y, C2(std::polar(1.0, th) * x)));
    auto r2 = boost::math::tools::brent_find_minima(
        [&](double th) { return dist_X(y, C2(std::polar(1.0, th) * x)); }, std::arg(x.dot(y)) - 0.5,
        std::arg(x.dot(y)) + 0.5, 52);
    m = std::min(m, r2.second);
    CHECK(std::abs(m - dist_M(x, y)) <= 1e-6 * std::max(dist_M(x, y), 1e-3));
  }
}

TEST_CASE("zeta of subspaces") {
  Mat B = Mat::Identity(4, 4);
  // (x1, x2, y1, y2) ordering: Darboux basis e1, e2, f1, f2 is the identity
  CHECK(zeta_subspace(B).zeta == doctest::Approx(1.0));
  Mat C(4, 2);
  C.col(0) << 1, 0, 0, 0;
  C.col(1) << 0, 0, 1, 0;
  CHECK(zeta_subspace(C).zeta == doctest::Approx(1.0));
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Mat V(4, 2);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) V(i, j) = nd(rng);
    Vec a = V.col(0), b = V.col(1);
    // |ω(a,b)| / |a ∧ b| on the raw pair, no Darboux reduction
    double om = a.dot(J0(2).transpose() * b);
    double area = std::sqrt(a.squaredNorm() * b.squaredNorm() - std::pow(a.dot(b), 2));
    double z1 = zeta_subspace(darboux_basis(V)).zeta;
    CHECK(z1 == doctest::Approx(std::abs(om) / area).epsilon(1e-10));
    Mat V2(4, 2);
    V2.col(0) = 2 * a - b;
    V2.col(1) = a + 0.3 * b;
    CHECK(std::abs(zeta_subspace(darboux_basis(V2)).zeta - z1) < 1e-8);
  }
  Mat bad(4, 2);
  bad.col(0) << 1, 0, 0, 0;
  bad.col(1) << 0, 2, 0, 0;
  CHECK_THROWS_AS(zeta_subspace(bad), ValidationError);
}

TEST_CASE("symplectic complement") {
  Mat V(4, 2);
  V.col(0) << 1, 0.5, 0, 0;
  V.col(1) << 0, 0, 1, 0.2;
  Mat N = symplectic_complement(V);
  REQUIRE(N.cols() == 2);
  CHECK((V.transpose() * J0(2).transpose() * N).norm() < 1e-12);
}
