#include "btlab/harness.hpp"
#include "btlab/oscillatory.hpp"
#include "btlab/symplin.hpp"

#include <cmath>

namespace btlab {

using nlohmann::json;

namespace {

struct Suite {
  std::string name;
  json checks = json::array();
  bool pass = true;

  // value ≤ threshold passes
  void below(const std::string& what, double value, double threshold) {
    bool ok = value <= threshold;
    checks.push_back({{"name", what}, {"value", value}, {"threshold", threshold}, {"pass", ok}});
    pass = pass && ok;
  }
  void truth(const std::string& what, bool ok) {
    checks.push_back({{"name", what}, {"value", ok}, {"pass", ok}});
    pass = pass && ok;
  }
  json dump() const { return {{"name", name}, {"checks", checks}, {"pass", pass}}; }
};

Vec gauss_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

C2 random_point(std::mt19937_64& rng) {
  Vec g = gauss_vec(rng, 4);
  C2 Z(cplx(g(0), g(1)), cplx(g(2), g(3)));
  return Z / Z.norm();
}

Suite symplin_suite(std::mt19937_64& rng) {
  Suite s{"symplin"};
  double polar = 0, sym = 0, nuGap = 0, reS = 0, sAu = 0, vc = 0;
  for (int t = 0; t < 150; ++t) {
    const int d = 1 + t % 3;
    SymplecticMap A = SymplecticMap::make(random_symplectic(d, rng));
    const double an = A.A.norm();
    PolarFactors pf = polar_decompose(A);
    const Mat I = Mat::Identity(2 * d, 2 * d);
    polar = std::max({polar, (pf.O * pf.P - A.A).norm() / an, (pf.O.transpose() * pf.O - I).norm(),
                      (pf.O.transpose() * J0(d) * pf.O - J0(d)).norm(), (pf.P - pf.P.transpose()).norm() / an});
    PoincareData pd = poincare_data(A);
    for (const Mat* X : {&pd.QA, &pd.PA, &pd.RA})
      sym = std::max(sym, (*X - X->transpose()).norm() / std::max(1.0, X->norm()));
    nuGap = std::max(nuGap, (std::pow(2.0, d) - pd.nuA) / std::pow(2.0, d));
    QuadraticFormS S(A);
    Vec u = gauss_vec(rng, 2 * d), w = gauss_vec(rng, 2 * d);
    const double sc = (u.squaredNorm() + w.squaredNorm()) * (1.0 + an * an);
    reS = std::max(reS, S.S(u, w).real() / sc);
    sAu = std::max(sAu, std::abs(S.S(u, A.A * u)) / sc);
    Splitting sp = symplectic_splitting(A);
    if (sp.veryClean && sp.im.cols() > 0) {
      NormalQuadraticForm nq = restrict_Q_normal(S, sp.im);
      vc = std::max(vc, nq.minRealEig > 0.0 ? 0.0 : 1.0);
    }
  }
  s.below("polar factors", polar, 1e-10);
  s.below("Q/P/R symmetry", sym, 1e-10);
  s.below("nu >= 2^d", nuGap, 1e-10);
  s.below("Re S <= 0", reS, 1e-10);
  s.below("S(u,Au) = 0", sAu, 1e-10);
  s.below("very clean positivity", vc, 0.0);
  return s;
}

Suite oscillatory_suite() {
  Suite s{"oscillatory"};
  ModelPhaseData md = model_phase_data(0.8, 0.3);
  s.truth("inverse hessian", md.hessian * md.inverseHessian == IMat4::Identity());
  s.truth("det = 1", integer_det(md.hessian) == 1);
  s.truth("signature = 0", md.signature == 0);
  s.below("gradient at critical point", model_phase_gradient(0.8, 0.3, md.criticalPoint).norm(), 1e-12);
  Mat Q = 2.0 * Mat::Identity(2, 2);
  Q(0, 1) = Q(1, 0) = 0.3;
  Vec H(2);
  H << 0.4, -0.2;
  cplx m0 = gaussian_moment(Q, H, {0, 0});
  cplx cf = gaussian_closed_form(GaussianIdentityInputs::make(Q, Vec::Zero(2), H, 0.0));
  s.below("moment/closed form", std::abs(m0 - cf) / std::abs(cf), 1e-12);
  const double lam = 3.0;
  cplx fq = oscillatory_quadrature([](double x) { return x; }, [](double x) { return cplx(std::exp(-x * x), 0.0); },
                                   -9.0, 9.0, lam);
  s.below("fourier of gaussian", std::abs(fq - std::sqrt(kPi) * std::exp(-lam * lam / 4.0)), 1e-10);
  return s;
}

Suite geometry_suite(std::mt19937_64& rng) {
  Suite s{"geometry"};
  double worst = 0.0;
  for (int t = 0; t < 8; ++t) {
    HeisenbergChart ch(CirclePoint::fromC2(random_point(rng)), false);
    auto r = ch.residuals();
    worst = std::max({worst, r.metric, r.omega, r.complexStructure, r.translation, std::abs(r.alphaCoefficient - 1.0),
                      std::abs(r.alphaDtheta - 1.0)});
  }
  s.below("chart normal form", worst, 1e-6);
  s.below("volume", std::abs(cp1_model().totalSymplecticVolume() - kPi), 0.0);
  return s;
}

Suite dynamics_suite(std::mt19937_64& rng) {
  Suite s{"dynamics"};
  Hamiltonian R = make_hamiltonian("rotation");
  double diff = 0.0;
  for (int t = 0; t < 6; ++t) {
    C2 Z = random_point(rng);
    diff = std::max(diff, (integrate_contact(R, Z, 1.3, nullptr).end - exact_contact_flow(R, Z, 1.3)).norm());
  }
  s.below("contact flow vs exact", diff, 1e-8);
  PeriodProfile p = classify_period(R, 0.9);
  s.truth("rotation: two isolated fixed points", p.components.size() == 2 && p.veryClean);
  PeriodProfile q = classify_period(make_hamiltonian("perturbed-rotation"), 0.0);
  s.truth("perturbed: Morse-Bott at 0 with two critical points",
          q.morseBott && q.components.size() == 1 && q.components[0].critical.size() == 2);
  return s;
}

Suite quantization_suite(std::mt19937_64& rng) {
  Suite s{"quantization"};
  const KahlerModel M = cp1_model();
  bool dims = true;
  double ortho = 0, routes = 0, tr = 0;
  for (int k = 1; k <= 16; ++k) {
    QuantumLevel L = level(M, k);
    dims = dims && L.Nk == k + 1;
    ortho = std::max(ortho, (L.basis.adjoint() * L.gram * L.basis - CMat::Identity(L.Nk, L.Nk)).norm());
    C2 x = random_point(rng), y = random_point(rng);
    routes = std::max(routes, std::abs(szego_eval(L, x, y) - szego_closed_form(L, x, y)) / L.szegoConstant);
    tr = std::max(tr, std::abs(trace(szego(L)) - cplx(L.Nk, 0.0)));
  }
  s.truth("N_k = k+1", dims);
  s.below("orthonormality", ortho, 1e-8);
  s.below("two-route kernel", routes, 1e-8);
  s.below("trace(Pi_k) = N_k", tr, 0.0);
  QuantumLevel L = level(M, 8);
  C2 x = random_point(rng), y = random_point(rng);
  cplx rep{0.0, 0.0};
  for (int r = 0; r < L.quad.nr; ++r)
    for (int c = 0; c < L.quad.nphi; ++c) {
      C2 z = L.quad.lift(r, c);
      rep += L.quad.wr[r] * szego_closed_form(L, x, z) * szego_closed_form(L, z, y);
    }
  cplx ref = szego_closed_form(L, x, y);
  s.below("reproducing property", std::abs(rep - ref) / std::abs(ref), 1e-6);
  s.below("toeplitz(1) = I", (toeplitz(L, [](const Vec3&) { return cplx(1.0, 0.0); }).entries - CMat::Identity(9, 9)).norm(),
          1e-10);
  CMat T = toeplitz(L, [](const Vec3& n) { return cplx(n(2), 0.0); }).entries;
  s.below("toeplitz hermitian", (T - T.adjoint()).norm(), 1e-8);
  CMat U = evolution(L, make_hamiltonian("rotation"), 0.7).entries;
  s.below("rotation evolution unitary", (U.adjoint() * U - CMat::Identity(9, 9)).norm(), 1e-8);
  return s;
}

Suite asymptotics_suite() {
  Suite s{"asymptotics"};
  Hamiltonian R = make_hamiltonian("rotation");
  PeriodProfile p = classify_period(R, 0.9);
  double lef = 0.0;
  for (int k : {8, 16, 32}) {
    cplx ex = exact_weight_trace(R, k, 0.9);
    lef = std::max(lef, std::abs(predict_trace_fixed(p, R, {}, k).value - ex) / std::abs(ex));
  }
  s.below("holomorphic Lefschetz", lef, 1e-8);
  PeriodProfile p0 = classify_period(R, 0.0);
  s.below("Weyl leading term", std::abs(predict_trace_fixed(p0, R, {}, 40).value - 40.0) / 40.0, 1e-6);
  cplx a = predict_trace_rescaled(p0, R, {}, 64, 1.0, 1.0).value;
  cplx b = predict_trace_rescaled(p0, R, {}, 64, -1.0, 1.0).value;
  s.below("tau -> -tau conjugation", std::abs(a - std::conj(b)), 1e-12);
  LocalProbeGeometry g = local_probe_geometry(R, C2(1.0, 0.0), 0.0);
  s.below("on-diagonal Szego law", std::abs(predict_local_kernel(g, 0.0, Vec::Zero(2), Vec::Zero(2), 50).value - 50.0 / kPi),
          1e-9);
  return s;
}

Suite harness_suite() {
  Suite s{"harness"};
  std::vector<int> ks{32, 48, 64, 96, 128, 192, 256, 384, 512};
  std::vector<double> e;
  for (int k : ks) e.push_back(3.0 / k);
  FitResult f = fit_slope(ks, e);
  s.below("slope fit on exact power law", std::abs(f.slope + 1.0), 1e-12);
  return s;
}

}  // namespace

json selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Suite> suites;
  suites.push_back(symplin_suite(rng));
  suites.push_back(oscillatory_suite());
  suites.push_back(geometry_suite(rng));
  suites.push_back(dynamics_suite(rng));
  suites.push_back(quantization_suite(rng));
  suites.push_back(asymptotics_suite());
  suites.push_back(harness_suite());
  json out = {{"seed", seed}, {"suites", json::array()}};
  bool pass = true;
  for (auto& s : suites) {
    out["suites"].push_back(s.dump());
    pass = pass && s.pass;
  }
  out["pass"] = pass;
  return out;
}

}  // namespace btlab
