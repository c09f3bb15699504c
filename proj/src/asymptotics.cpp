#include "btlab/asymptotics.hpp"

#include <cmath>
#include <sstream>

namespace btlab {

LocalProbeGeometry local_probe_geometry(const Hamiltonian& ham, const C2& x, double tau0, double tol) {
  LocalProbeGeometry g;
  g.tau0 = tau0;
  g.rm = return_map(ham, x, tau0, tol);
  g.fm = ham.value(x);
  g.upsilon = hamiltonian_field(ham, g.rm.target);
  g.pd = poincare_data(SymplecticMap::make(g.rm.A));
  return g;
}

LocalKernelPrediction predict_local_kernel(const LocalProbeGeometry& g, double tau, const Vec& u, const Vec& w, int k,
                                           double rho, const LocalKernelOptions& opt) {
  const double lim = opt.window * std::pow(static_cast<double>(k), 1.0 / 9.0);
  if (u.norm() > lim || w.norm() > lim || std::abs(tau) > lim) {
    std::ostringstream os;
    os << "probe outside the window E k^{1/9} = " << lim << " (|u|=" << u.norm() << ", |w|=" << w.norm()
       << ", |tau|=" << std::abs(tau) << ")";
    throw RangeError(os.str());
  }
  QuadraticFormS form(SymplecticMap{1, g.rm.A});
  LocalKernelPrediction p;
  const double sk = std::sqrt(static_cast<double>(k));
  p.phase = std::polar(1.0, tau * sk * g.fm);
  p.amplitude = 2.0 / g.pd.nuA * (k / kPi) * rho;
  p.exponent = form.S(u, tau * g.upsilon + w) + kI * tau * omega0(g.upsilon, w);
  p.value = p.phase * p.amplitude * std::exp(p.exponent);
  if (opt.sameChart) {
    if (!g.rm.sameFiber) throw PreconditionError("same-chart probes need x_{tau0} on the fiber of x");
    const cplx h = g.rm.holonomy / std::abs(g.rm.holonomy);
    p.holonomyPower = std::polar(1.0, k * std::arg(h));
    p.holonomyApplied = true;
    p.value *= p.holonomyPower;
  }
  return p;
}

namespace {

struct PointFactor {
  cplx value;   // (2/ν) ζ_N det(𝔔^nor)^{-1/2}
  cplx detSqrt;
};

// Normal data at a fixed point p of φ_{τ₀}. anchor selects the det^{1/2} branch.
PointFactor point_factor(const Hamiltonian& ham, const C2& p, double tau0, double tol, const cplx* anchor) {
  if (tau0 == 0.0) return {cplx(1.0, 0.0), cplx(1.0, 0.0)};  // A = I: ν = 2, no normal part
  ReturnMap rm = return_map(ham, p, tau0, tol);
  SymplecticMap A = SymplecticMap::make(rm.A);
  PoincareData pd = poincare_data(A);
  Splitting sp = symplectic_splitting(A);
  if (!sp.veryClean) throw PreconditionError("fixed locus is not very clean");
  cplx ds{1.0, 0.0};
  double zeta = 1.0;
  if (sp.im.cols() > 0) {
    Mat B = darboux_basis(sp.im);
    zeta = zeta_subspace(B).zeta;
    NormalQuadraticForm nq = restrict_Q_normal(QuadraticFormS(A), B);
    ds = anchor ? det_sqrt_tracked(nq.matrix, *anchor) : nq.detSqrt;
  }
  return {2.0 / pd.nuA * zeta / ds, ds};
}

// ∫_M F dV over the polar parametrization with trapezoid refinement and
// Richardson extrapolation. F receives the lift and its mesh location.
cplx integrate_sphere(const std::function<cplx(const C2&, const cplx*, cplx*)>& F, const MeshOptions& opt,
                      TracePrediction& out) {
  auto trap = [&](int n) {
    // n intervals in β ∈ [0,π], 2n in φ; endpoints carry zero weight (sin β = 0)
    const double hb = kPi / n, hp = kPi / n;
    std::vector<cplx> rows(n + 1, cplx(0.0, 0.0));
    parallel_for(static_cast<std::size_t>(n - 1), [&](std::size_t i0) {
      const int i = static_cast<int>(i0) + 1;
      const double beta = i * hb;
      cplx s{0.0, 0.0};
      cplx anchor{1.0, 0.0};
      bool haveAnchor = false;
      for (int j = 0; j < 2 * n; ++j) {
        const double ph = j * hp;
        C2 Z(std::cos(0.5 * beta), std::polar(std::sin(0.5 * beta), ph));
        cplx ds;
        try {
          s += F(Z, haveAnchor ? &anchor : nullptr, &ds);
        } catch (const BranchError& e) {
          std::ostringstream os;
          os << e.what() << " at beta=" << beta << " phi=" << ph;
          throw BranchError(os.str());
        }
        anchor = ds;
        haveAnchor = true;
      }
      rows[i] = 0.25 * std::sin(beta) * hb * hp * s;
    });
    cplx t{0.0, 0.0};
    for (auto& r : rows) t += r;
    out.meshPoints += (n - 1) * 2 * n;
    return t;
  };
  int n = opt.initial;
  cplx prev = trap(n);
  cplx prevR = prev;
  for (int lev = 1; lev < opt.maxLevels; ++lev) {
    n *= 2;
    cplx cur = trap(n);
    cplx R = (4.0 * cur - prev) / 3.0;
    out.meshLevels = lev + 1;
    if (lev > 1 && std::abs(R - prevR) <= opt.relTol * std::max(std::abs(R), 1e-300)) return R;
    prev = cur;
    prevR = R;
  }
  out.branchRecords.push_back("mesh refinement stopped before reaching the requested stability");
  return prevR;
}

cplx integer_power(cplx h, int k) { return std::polar(std::pow(std::abs(h), k), k * std::arg(h)); }

}  // namespace

TracePrediction predict_trace_fixed(const PeriodProfile& profile, const Hamiltonian& ham, const Symbol& rho, int k,
                                    const MeshOptions& opt) {
  if (!profile.veryClean) throw PreconditionError("fixed-time prediction needs a very clean period");
  TracePrediction tp;
  auto rhoAt = [&](const C2& p) { return rho ? rho(c2_to_bloch(p)) : cplx(1.0, 0.0); };
  for (std::size_t a = 0; a < profile.components.size(); ++a) {
    const FixedComponent& fc = profile.components[a];
    ComponentTerm t;
    t.component = static_cast<int>(a);
    t.da = fc.dim2 / 2;
    t.holonomyPower = integer_power(fc.holonomy, k);
    if (fc.wholeManifold) {
      auto F = [&](const C2& p, const cplx* anchor, cplx* ds) {
        PointFactor pf = point_factor(ham, p, profile.tau0, opt.tol, anchor);
        if (anchor && std::abs(pf.detSqrt - *anchor) > 0.5 * std::abs(*anchor))
          throw BranchError("det^{-1/2} branch jump along the mesh");
        *ds = pf.detSqrt;
        return rhoAt(p) * pf.value;
      };
      t.coefficient = integrate_sphere(F, opt, tp);
      t.value = t.holonomyPower * (k / kPi) * t.coefficient;
    } else {
      if (fc.dim2 != 0) throw PreconditionError("positive-dimensional proper fixed components are not supported on CP1");
      const C2& q = fc.samples.front();
      t.coefficient = rhoAt(q) * point_factor(ham, q, profile.tau0, opt.tol, nullptr).value;
      t.value = t.holonomyPower * t.coefficient;
    }
    tp.value += t.value;
    tp.terms.push_back(t);
  }
  return tp;
}

TracePrediction predict_trace_rescaled(const PeriodProfile& profile, const Hamiltonian& ham, const Symbol& rho, int k,
                                       double tau, double C, const MeshOptions& opt) {
  if (!profile.morseBott) throw PreconditionError("rescaled prediction needs a Morse-Bott period");
  const double kk = static_cast<double>(k);
  const double lo = C * std::pow(kk, -1.0 / 9.0), hi = C * std::pow(kk, 1.0 / 9.0);
  if (!(std::abs(tau) > lo && std::abs(tau) < hi)) {
    std::ostringstream os;
    os << "|tau|=" << std::abs(tau) << " outside the window (" << lo << ", " << hi << ")";
    throw RangeError(os.str());
  }
  TracePrediction tp;
  const double sk = std::sqrt(kk);
  for (std::size_t a = 0; a < profile.components.size(); ++a) {
    const FixedComponent& fc = profile.components[a];
    const int da = fc.dim2 / 2;
    const cplx hk = integer_power(fc.holonomy, k);
    for (std::size_t b = 0; b < fc.critical.size(); ++b) {
      const CriticalData& cd = fc.critical[b];
      ComponentTerm t;
      t.component = static_cast<int>(a);
      t.critical = static_cast<int>(b);
      t.da = da;
      t.dab = cd.dim2 / 2;
      t.holonomyPower = hk;
      t.signature = cd.signature;
      t.fab = cd.fab;
      const cplx r = rho ? rho(c2_to_bloch(cd.point)) : cplx(1.0, 0.0);
      PointFactor pf = point_factor(ham, cd.point, profile.tau0, opt.tol, nullptr);
      double zetaF = 1.0;  // Heisenberg frames are unitary on T_pM
      t.coefficient = r * pf.value * zetaF / std::sqrt(cd.transverseHessian.size() ? cd.detAbs : 1.0);
      const double pref = std::pow(kk, 0.5 * (t.da + t.dab)) / std::pow(kPi, t.da) *
                          std::pow(2.0 * kPi / tau, t.da - t.dab);
      t.value = hk * pref * std::polar(1.0, sk * tau * cd.fab + kPi * cd.signature / 4.0) * t.coefficient;
      tp.value += t.value;
      tp.terms.push_back(t);
    }
  }
  return tp;
}

TermMagnitude term_magnitude(int l, int r, int k, double C) {
  const double kk = static_cast<double>(k);
  const double lo = C * std::pow(kk, -1.0 / 9.0), hi = C * std::pow(kk, 1.0 / 9.0);
  const int deg = 3 * (l + r);
  TermMagnitude m;
  // k^{-l/2} fixed; (τ√k)^{-r} largest at lo; Σ_{i≤deg}|τ|^i largest at hi
  double poly = 0.0;
  for (int i = 0; i <= deg; ++i) poly += std::pow(hi, i);
  m.bound = std::pow(kk, -0.5 * l) * std::pow(lo * std::sqrt(kk), -r) * poly;
  m.reference = std::pow(kk, -(l + r) / 18.0);
  m.ratio = m.bound / m.reference;
  return m;
}

namespace {
nlohmann::json cj(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }
}  // namespace

nlohmann::json to_json(const LocalKernelPrediction& p) {
  return {{"value", cj(p.value)},          {"phase", cj(p.phase)},
          {"amplitude", p.amplitude},      {"exponent", cj(p.exponent)},
          {"holonomyPower", cj(p.holonomyPower)}, {"holonomyApplied", p.holonomyApplied}};
}

nlohmann::json to_json(const TracePrediction& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms)
    terms.push_back({{"component", t.component},
                     {"critical", t.critical},
                     {"da", t.da},
                     {"dab", t.dab},
                     {"holonomyPower", cj(t.holonomyPower)},
                     {"coefficient", cj(t.coefficient)},
                     {"value", cj(t.value)},
                     {"signature", t.signature},
                     {"fab", t.fab}});
  return {{"value", cj(p.value)},
          {"terms", terms},
          {"meshLevels", p.meshLevels},
          {"meshPoints", p.meshPoints},
          {"branchRecords", p.branchRecords}};
}

}  // namespace btlab
