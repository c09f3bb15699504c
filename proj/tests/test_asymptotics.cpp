#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btlab/asymptotics.hpp"

using namespace btlab;

namespace {

const Hamiltonian R = make_hamiltonian("rotation");
const Hamiltonian P = make_hamiltonian("perturbed-rotation");

}  // namespace

TEST_CASE("local kernel law") {
  LocalProbeGeometry g0 = local_probe_geometry(R, C2(1.0, 0.0), 0.0);
  for (int k : {10, 100}) {
    auto p = predict_local_kernel(g0, 0.0, Vec::Zero(2), Vec::Zero(2), k, 1.5);
    CHECK(std::abs(p.value - 1.5 * k / kPi) < 1e-12 * k);
  }
  // fixed point of the rotation: h^k (k/π)(2/ν) e^{−𝔔(v)}, 𝔔(v) = (1 − e^{iθ})‖v‖², A = R(θ)
  LocalProbeGeometry g = local_probe_geometry(R, C2(1.0, 0.0), 0.9);
  const double th = std::atan2(g.rm.A(1, 0), g.rm.A(0, 0));
  CHECK(std::abs(std::abs(th) - 0.9) < 1e-12);
  CHECK(g.pd.nuA == doctest::Approx(2.0));
  Vec v(2);
  v << 0.3, 0.4;
  LocalKernelOptions sc;
  sc.sameChart = true;
  const int k = 40;
  auto p = predict_local_kernel(g, 0.0, v, v, k, 1.0, sc);
  cplx q = (1.0 - std::polar(1.0, th)) * v.squaredNorm();
  cplx h = g.rm.holonomy;
  cplx expect = std::pow(h, k) * (k / kPi) * std::exp(-q);
  CHECK(std::abs(p.value - expect) < 1e-12 * k);
  CHECK(p.holonomyApplied);
  // w = Au at τ = 0 gives a unit Gaussian factor
  Vec u(2);
  u << -0.5, 0.2;
  auto pa = predict_local_kernel(g, 0.0, u, g.rm.A * u, k);
  CHECK(std::abs(pa.exponent) < 1e-12);
  // the exponent has non-positive real part
  LocalProbeGeometry gp = local_probe_geometry(P, C2(0.6, 0.8), 0.7);
  for (double t : {-0.5, 0.0, 0.8}) CHECK(predict_local_kernel(gp, t, u, v, k).exponent.real() <= 1e-14);
  // window
  Vec far(2);
  far << 3.0, 0.0;
  CHECK_THROWS_AS(predict_local_kernel(g, 0.0, far, v, 10), RangeError);
  CHECK_THROWS_AS(predict_local_kernel(g, 2.5, v, v, 10), RangeError);
  CHECK_NOTHROW(predict_local_kernel(g, 0.0, far, v, 100000));
  // same-chart probes need x_{τ₀} on the fiber of x
  CHECK_THROWS_AS(predict_local_kernel(gp, 0.0, u, v, k, 1.0, sc), PreconditionError);
}

TEST_CASE("fixed-time trace prediction") {
  PeriodProfile p0 = classify_period(R, 0.0);
  for (int k : {10, 64}) CHECK(std::abs(predict_trace_fixed(p0, R, {}, k).value - double(k)) < 1e-6 * k);
  PeriodProfile p = classify_period(R, 0.9);
  for (int k : {5, 32, 128}) {
    TracePrediction tp = predict_trace_fixed(p, R, {}, k);
    cplx geo = std::sin((k + 1) * 0.45) / std::sin(0.45);
    CHECK(std::abs(tp.value - geo) < 1e-10 * std::max(1.0, std::abs(geo)));
    REQUIRE(tp.terms.size() == 2);
    for (const auto& t : tp.terms) CHECK(std::abs(std::abs(t.holonomyPower) - 1.0) < 1e-12);
    // each pole contributes h^k/(1 − e^{±iθ})
    cplx a = std::polar(1.0, 0.45 * k) / (1.0 - std::polar(1.0, -0.9));
    cplx b = std::polar(1.0, -0.45 * k) / (1.0 - std::polar(1.0, 0.9));
    double m0 = std::min(std::abs(tp.terms[0].value - a), std::abs(tp.terms[0].value - b));
    CHECK(m0 < 1e-10);
  }
  // constant symbols scale the prediction
  cplx base = predict_trace_fixed(p, R, {}, 16).value;
  CHECK(std::abs(predict_trace_fixed(p, R, [](const Vec3&) { return cplx(2.5, 0.0); }, 16).value - 2.5 * base) <
        1e-12 * std::abs(base));
  CHECK(std::abs(predict_trace_fixed(p0, R, [](const Vec3&) { return cplx(0.5, 0.0); }, 16).value - 8.0) < 1e-6);
  // ∫ n₃² dV_M = π/3 on CP¹
  TracePrediction sq = predict_trace_fixed(p0, R, [](const Vec3& n) { return cplx(n(2) * n(2), 0.0); }, 30);
  CHECK(std::abs(sq.value - 10.0) < 1e-5);
  CHECK(sq.meshLevels >= 2);
  PeriodProfile empty;
  empty.veryClean = true;
  CHECK(predict_trace_fixed(empty, R, {}, 8).value == cplx(0.0, 0.0));
  PeriodProfile dirty;
  CHECK_THROWS_AS(predict_trace_fixed(dirty, R, {}, 8), PreconditionError);
}

TEST_CASE("rescaled trace prediction") {
  PeriodProfile p0 = classify_period(R, 0.0);
  const int k = 256;
  const double tau = 1.0, sk = 16.0;
  TracePrediction tp = predict_trace_rescaled(p0, R, {}, k, tau, 1.0);
  REQUIRE(tp.terms.size() == 2);
  // f = n₃/2 has Hessian ∓2I at the poles in unit frames: |det| = 4, σ = ∓2
  cplx north = (2 * sk / tau) * std::polar(1.0, sk * tau * 0.5 - kPi / 2) / 2.0;
  cplx south = (2 * sk / tau) * std::polar(1.0, -sk * tau * 0.5 + kPi / 2) / 2.0;
  CHECK(std::abs(tp.value - (north + south)) < 1e-9 * std::abs(north));
  for (const auto& t : tp.terms) {
    CHECK(std::abs(t.fab) == doctest::Approx(0.5));
    CHECK(t.signature == (t.fab > 0 ? -2 : 2));
  }
  cplx neg = predict_trace_rescaled(p0, R, {}, k, -tau, 1.0).value;
  CHECK(std::abs(neg - std::conj(tp.value)) < 1e-10 * std::abs(tp.value));
  // doubling τ halves each term
  TracePrediction t2 = predict_trace_rescaled(p0, R, {}, k, 2 * tau, 2.0);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(std::abs(t2.terms[i].value) == doctest::Approx(0.5 * std::abs(tp.terms[i].value)).epsilon(1e-12));
  CHECK_THROWS_AS(predict_trace_rescaled(p0, R, {}, k, 5.0, 1.0), RangeError);
  CHECK_THROWS_AS(predict_trace_rescaled(p0, R, {}, k, 0.1, 1.0), RangeError);
  PeriodProfile nmb = p0;
  nmb.morseBott = false;
  CHECK_THROWS_AS(predict_trace_rescaled(nmb, R, {}, k, tau, 1.0), PreconditionError);
  // the perturbed Hamiltonian keeps the poles at f = ±1/2 with the same Hessian up to ε
  PeriodProfile pp = classify_period(P, 0.0);
  TracePrediction tq = predict_trace_rescaled(pp, P, {}, k, tau, 1.0);
  CHECK(tq.terms.size() == 2);
  CHECK(std::isfinite(std::abs(tq.value)));
}

TEST_CASE("term magnitudes stay summable on the window") {
  for (int s = 0; s <= 4; ++s)
    for (int l = 0; l <= s; ++l) {
      const int r = s - l;
      double prev = term_magnitude(l, r, 32, 1.0).ratio;
      for (int k : {64, 128, 256, 512, 4096}) {
        TermMagnitude m = term_magnitude(l, r, k, 1.0);
        CHECK(m.ratio <= prev * (1 + 1e-12));
        CHECK(m.reference == doctest::Approx(std::pow(k, -s / 18.0)));
        prev = m.ratio;
      }
    }
}

TEST_CASE("json serialization") {
  PeriodProfile p = classify_period(R, 0.9);
  auto j = to_json(predict_trace_fixed(p, R, {}, 8));
  CHECK(j["terms"].size() == 2);
  CHECK(j.contains("meshLevels"));
  LocalProbeGeometry g = local_probe_geometry(R, C2(1.0, 0.0), 0.0);
  auto jl = to_json(predict_local_kernel(g, 0.0, Vec::Zero(2), Vec::Zero(2), 8));
  CHECK(jl["amplitude"].get<double>() == doctest::Approx(8 / kPi));
}
