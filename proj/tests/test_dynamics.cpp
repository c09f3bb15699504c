#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btlab/dynamics.hpp"
#include "btlab/quantization.hpp"
#include "btlab/symplin.hpp"

#include <random>
#include <set>

using namespace btlab;

namespace {

C2 rand_point(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  C2 Z(cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)));
  return Z / Z.norm();
}

}  // namespace

TEST_CASE("flow basics") {
  Hamiltonian R = make_hamiltonian("rotation");
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    C2 Z = rand_point(rng);
    FlowResult f0 = flow(R, Z, 0.0);
    CHECK(dist_M(f0.end, Z) < 1e-12);
    CHECK((f0.differential - Mat::Identity(2, 2)).norm() < 1e-10);
    // full base period of the height rotation
    CHECK(dist_M(flow(R, Z, 2 * kPi).end, Z) < 1e-8);
    CHECK(dist_M(flow(R, Z, kPi).end, Z) > 1e-3 * (1.0 - std::abs(c2_to_bloch(Z)(2))));
  }
}

TEST_CASE("group law and exact rotation") {
  Hamiltonian R = make_hamiltonian("rotation");
  Hamiltonian P = make_hamiltonian("perturbed-rotation");
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ud(-1.5, 1.5);
  for (int t = 0; t < 10; ++t) {
    C2 Z = rand_point(rng);
    double a = ud(rng), b = ud(rng);
    for (const Hamiltonian* h : {&R, &P}) {
      C2 ab = integrate_contact(*h, Z, a + b, nullptr).end;
      C2 seq = integrate_contact(*h, integrate_contact(*h, Z, b, nullptr).end, a, nullptr).end;
      CHECK((ab - seq).norm() < 1e-9);
    }
    CHECK((integrate_contact(R, Z, a, nullptr).end - exact_contact_flow(R, Z, a)).norm() < 1e-9);
  }
}

TEST_CASE("differential is symplectic") {
  Hamiltonian P = make_hamiltonian("perturbed-rotation");
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    FlowResult f = flow(P, rand_point(rng), 0.8);
    CHECK(SymplecticMap::make(f.differential).residual() < 1e-8);
  }
}

TEST_CASE("contact lift") {
  // f ≡ c: base fixed, fiber phase −cτ
  Hamiltonian K = quadratic_hamiltonian("const", 0.7, Vec3::Zero(), Mat3::Zero());
  std::mt19937_64 rng(4);
  C2 Z = rand_point(rng);
  ContactLiftResult L = contact_lift(K, CirclePoint::fromC2(Z), 1.3);
  CHECK((L.endC2 - std::polar(1.0, -0.7 * 1.3) * Z).norm() < 1e-9);
  // equivariance under the circle action
  Hamiltonian P = make_hamiltonian("perturbed-rotation");
  for (int t = 0; t < 10; ++t) {
    CirclePoint x = CirclePoint::fromC2(rand_point(rng));
    C2 a = contact_lift(P, x.rotated(0.9), 1.1).endC2;
    C2 b = std::polar(1.0, 0.9) * contact_lift(P, x, 1.1).endC2;
    CHECK((a - b).norm() < 1e-9);
  }
}

TEST_CASE("holonomy over a pole matches the weight-basis eigenvalue") {
  Hamiltonian R = make_hamiltonian("rotation");
  const double tau0 = 0.9;
  ReturnMap rm = return_map(R, C2(1.0, 0.0), tau0);
  REQUIRE(rm.sameFiber);
  // ⟨e^{iτ₀H}x, x⟩ with H = diag(½, −½): the k-th power is the top weight eigenvalue of the evolution
  const int k = 6;
  QuantumLevel L = level(cp1_model(), k);
  CMat U = evolution(L, R, tau0).entries;
  CHECK((U - CMat(U.diagonal().asDiagonal())).norm() < 1e-10);
  CHECK(std::abs(std::pow(rm.holonomy, k) - U(0, 0)) < 1e-6);
  ReturnMap south = return_map(R, C2(0.0, 1.0), tau0);
  CHECK(std::abs(std::pow(south.holonomy, k) - U(k, k)) < 1e-6);
}

TEST_CASE("classification") {
  Hamiltonian R = make_hamiltonian("rotation");
  PeriodProfile p0 = classify_period(R, 0.0);
  REQUIRE(p0.components.size() == 1);
  CHECK(p0.components[0].wholeManifold);
  CHECK(p0.components[0].dim2 == 2);
  CHECK(p0.veryClean);
  CHECK(p0.morseBott);

  PeriodProfile p = classify_period(R, 0.9);
  REQUIRE(p.components.size() == 2);
  for (const auto& c : p.components) {
    CHECK(c.dim2 == 0);
    CHECK(std::abs(std::abs(c.holonomy) - 1.0) < 1e-9);
    ReturnMap rm = return_map(R, c.samples.front(), 0.9);
    CHECK(std::abs(rm.A.determinant() - 1.0) < 1e-9);
    // A is a rotation by ±τ₀
    CHECK(std::abs(std::abs(rm.A(1, 0)) - std::sin(0.9)) < 1e-9);
    CHECK(std::abs(rm.A(0, 0) - std::cos(0.9)) < 1e-9);
  }
  CHECK(p.veryClean);
  CHECK(p.morseBott);

  PeriodProfile full = classify_period(R, 2 * kPi);
  REQUIRE(full.components.size() == 1);
  CHECK(full.components[0].wholeManifold);
  REQUIRE(full.components[0].critical.size() == 2);
  std::set<int> sig;
  for (const auto& cd : full.components[0].critical) {
    sig.insert(cd.signature);
    CHECK(cd.dim2 == 0);
    CHECK(cd.fieldNorm < 1e-8);
  }
  CHECK(sig == std::set<int>{-2, 2});

  PeriodProfile q = classify_period(make_hamiltonian("perturbed-rotation"), 0.0);
  CHECK(q.morseBott);
  REQUIRE(q.components.size() == 1);
  CHECK(q.components[0].critical.size() == 2);
}

TEST_CASE("critical points and Hessians of the height function") {
  Hamiltonian R = make_hamiltonian("rotation");
  auto cps = critical_points(R);
  REQUIRE(cps.size() == 2);
  for (const C2& q : cps) {
    double n3 = c2_to_bloch(q)(2);
    CHECK(std::abs(std::abs(n3) - 1.0) < 1e-9);
    Mat H = hessian_at(R, q);
    CHECK(std::abs(H(0, 0) - H(1, 1)) < 1e-8);
    CHECK(H(0, 0) * n3 < 0.0);
  }
}

TEST_CASE("unknown hamiltonian parameters are rejected") {
  CHECK_THROWS_AS(make_hamiltonian("rotation", {{"epsilon", 1.0}}), ArgumentError);
  CHECK_THROWS_AS(make_hamiltonian("nope"), ArgumentError);
}
