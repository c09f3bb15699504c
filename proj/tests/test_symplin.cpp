#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btlab/harness.hpp"
#include "btlab/symplin.hpp"

#include <Eigen/SVD>

#include <random>

using namespace btlab;

namespace {

Mat rot(double t) {
  Mat R(2, 2);
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return R;
}

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

}  // namespace

TEST_CASE("omega0 against the complex oracle") {
  CHECK(omega0(v2(1, 0), v2(0, 1)) == doctest::Approx(1.0));
  CHECK(omega0(v2(0.3, -2), v2(0.3, -2)) == 0.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    Vec r = v2(nd(rng), nd(rng)), s = v2(nd(rng), nd(rng));
    cplx zr(r(0), r(1)), zs(s(0), s(1));
    CHECK(omega0(r, s) == doctest::Approx((std::conj(zr) * zs).imag()).epsilon(1e-13));
  }
}

TEST_CASE("polar decomposition examples") {
  auto pf = polar_decompose(SymplecticMap::make(Mat::Identity(2, 2)));
  CHECK((pf.O - Mat::Identity(2, 2)).norm() < 1e-14);
  CHECK((pf.P - Mat::Identity(2, 2)).norm() < 1e-14);
  pf = polar_decompose(SymplecticMap::make(rot(0.8)));
  CHECK((pf.O - rot(0.8)).norm() < 1e-13);
  CHECK((pf.P - Mat::Identity(2, 2)).norm() < 1e-13);
  Mat D(2, 2);
  D << 3.0, 0.0, 0.0, 1.0 / 3.0;
  pf = polar_decompose(SymplecticMap::make(D));
  CHECK((pf.O - Mat::Identity(2, 2)).norm() < 1e-13);
  CHECK((pf.P - D).norm() < 1e-13);
}

TEST_CASE("polar factors match an SVD oracle") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    const int d = 1 + t % 3;
    Mat A = random_symplectic(d, rng, 1.2);
    auto pf = polar_decompose(SymplecticMap::make(A));
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat O = svd.matrixU() * svd.matrixV().transpose();
    Mat P = svd.matrixV() * svd.singularValues().asDiagonal() * svd.matrixV().transpose();
    CHECK((pf.O - O).norm() < 1e-10 * A.norm());
    CHECK((pf.P - P).norm() < 1e-10 * A.norm());
    CHECK((pf.P.transpose() * J0(d) * pf.P - J0(d)).norm() < 1e-9 * A.squaredNorm());
  }
}

TEST_CASE("non-symplectic input is rejected") {
  Mat B(2, 2);
  B << 1.0, 0.0, 0.0, 2.0;
  CHECK_THROWS_AS(SymplecticMap::make(B), ValidationError);
  CHECK_THROWS_AS(SymplecticMap::make(Mat::Identity(3, 3)), ArgumentError);
}

TEST_CASE("poincare data examples") {
  for (int d = 1; d <= 3; ++d) {
    auto pd = poincare_data(SymplecticMap::make(Mat::Identity(2 * d, 2 * d)));
    CHECK((pd.QA - 2.0 * Mat::Identity(2 * d, 2 * d)).norm() < 1e-14);
    CHECK((pd.PA - 0.5 * Mat::Identity(2 * d, 2 * d)).norm() < 1e-14);
    CHECK(pd.RA.norm() < 1e-14);
    CHECK(pd.nuA == doctest::Approx(std::pow(2.0, d)));
  }
  auto pr = poincare_data(SymplecticMap::make(rot(1.1)));
  CHECK((pr.QA - 2.0 * Mat::Identity(2, 2)).norm() < 1e-13);
  CHECK(pr.nuA == doctest::Approx(2.0));
  for (double lam : {0.5, 2.0, 7.0}) {
    Mat D(2, 2);
    D << lam, 0.0, 0.0, 1.0 / lam;
    auto pd = poincare_data(SymplecticMap::make(D));
    CHECK(pd.QA(0, 0) == doctest::Approx(1 + lam * lam));
    CHECK(pd.QA(1, 1) == doctest::Approx(1 + 1 / (lam * lam)));
    CHECK(pd.nuA == doctest::Approx(std::sqrt((1 + lam * lam) * (1 + 1 / (lam * lam)))));
  }
}

TEST_CASE("S and Q forms") {
  QuadraticFormS I(SymplecticMap::make(Mat::Identity(2, 2)));
  Vec u = v2(0.4, -1.2), w = v2(0.7, 0.1);
  cplx expect = -0.5 * (u - w).squaredNorm() - kI * omega0(u, w);
  CHECK(std::abs(eval_S(I, u, w) - expect) < 1e-14);
  CHECK(std::abs(eval_Qform(I, u)) < 1e-14);
  const double th = 0.9;
  QuadraticFormS R(SymplecticMap::make(rot(th)));
  cplx q = (1.0 - std::polar(1.0, th)) * u.squaredNorm();
  CHECK(std::abs(eval_Qform(R, u) - q) < 1e-13);
  CHECK(std::abs(eval_S(R, u, u) + q) < 1e-13);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    Mat A = random_symplectic(2, rng);
    QuadraticFormS S(SymplecticMap::make(A));
    Vec a = Vec::Random(4);
    CHECK(std::abs(S.S(a, A * a)) < 1e-12);
    CHECK(S.S(a, Vec::Random(4)).real() <= 0.0);
  }
}

TEST_CASE("symplectic splitting") {
  auto s = symplectic_splitting(SymplecticMap::make(Mat::Identity(2, 2)));
  CHECK(s.ker.cols() == 2);
  CHECK(s.im.cols() == 0);
  CHECK(s.veryClean);
  s = symplectic_splitting(SymplecticMap::make(rot(0.5)));
  CHECK(s.ker.cols() == 0);
  CHECK(s.im.cols() == 2);
  CHECK(s.veryClean);
  Mat sh(2, 2);
  sh << 1.0, 1.0, 0.0, 1.0;
  s = symplectic_splitting(SymplecticMap::make(sh));
  REQUIRE(s.ker.cols() == 1);
  REQUIRE(s.im.cols() == 1);
  CHECK(std::abs(std::abs(s.ker(0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(s.im(0, 0)) - 1.0) < 1e-12);
  CHECK_FALSE(s.veryClean);
}

TEST_CASE("normal restriction") {
  const double th = 1.3;
  auto A = SymplecticMap::make(rot(th));
  auto nq = restrict_Q_normal(QuadraticFormS(A), Mat::Identity(2, 2));
  cplx s = 1.0 - std::polar(1.0, th);
  CHECK((nq.matrix - s * CMat::Identity(2, 2)).norm() < 1e-13);
  CHECK(std::abs(nq.detSqrt - s) < 1e-13);
  CHECK(nq.detSqrt.real() > 0.0);
  auto e = restrict_Q_normal(QuadraticFormS(SymplecticMap::make(Mat::Identity(2, 2))), Mat(2, 0));
  CHECK(e.matrix.size() == 0);
  CHECK(e.detSqrt == cplx(1.0, 0.0));
  Mat sh(2, 2);
  sh << 1.0, 1.0, 0.0, 1.0;
  auto ss = symplectic_splitting(SymplecticMap::make(sh));
  CHECK_THROWS_AS(restrict_Q_normal(QuadraticFormS(SymplecticMap::make(sh)), ss.ker), ValidationError);
}

TEST_CASE("branch tracking follows a continuous family") {
  cplx prev = det_sqrt(CMat::Identity(2, 2));
  for (int i = 1; i <= 200; ++i) {
    double t = 0.03 * i;
    CMat M = std::polar(1.0, t) * CMat::Identity(2, 2);
    cplx ds = det_sqrt_tracked(M, prev);
    CHECK(std::abs(ds * ds - M.determinant()) < 1e-12);
    CHECK(std::abs(ds - prev) < 0.1);
    prev = ds;
  }
}

TEST_CASE("re S bound along the Hamiltonian direction at a rotation fixed point") {
  // A = R(θ), z ∈ ker(I − A) is empty here, so probe the normal part only
  QuadraticFormS S(SymplecticMap::make(rot(0.9)));
  double worst = 1e9;
  for (double a = -1; a <= 1; a += 0.25)
    for (double b = -1; b <= 1; b += 0.25) {
      Vec u = v2(a, b);
      if (u.norm() < 1e-9) continue;
      worst = std::min(worst, -S.S(u, u).real() / u.squaredNorm());
    }
  CHECK(worst > 0.0);
}
