#include "btlab/dynamics.hpp"

#include "btlab/symplin.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

namespace btlab {

namespace odeint = boost::numeric::odeint;

namespace {

U2 pauli_combo(const Vec3& g) {
  U2 G;
  G << cplx(g(2), 0.0), cplx(g(0), -g(1)), cplx(g(0), g(1)), cplx(-g(2), 0.0);
  return G;
}

// Z†σ_a δ for a = 1,2,3
Vec3 pauli_pairing_re(const C2& Z, const C2& d) {
  cplx s1 = std::conj(Z(0)) * d(1) + std::conj(Z(1)) * d(0);
  cplx s2 = std::conj(Z(0)) * (-kI * d(1)) + std::conj(Z(1)) * (kI * d(0));
  cplx s3 = std::conj(Z(0)) * d(0) - std::conj(Z(1)) * d(1);
  return {s1.real(), s2.real(), s3.real()};
}

struct FieldEval {
  C2 V;
  U2 G;
  double f = 0.0;
  double zgz = 0.0;
  Vec3 g;
  Mat3 H;
};

FieldEval eval_field(const Hamiltonian& ham, const C2& Z, bool withHessian) {
  FieldEval e;
  Vec3 n = c2_to_bloch(Z);
  e.f = ham.f(n);
  e.g = ham.grad(n);
  if (withHessian) e.H = ham.hess(n);
  e.G = pauli_combo(e.g);
  C2 GZ = e.G * Z;
  e.zgz = Z.dot(GZ).real();
  e.V = -kI * (GZ + (e.f - e.zgz) * Z);
  return e;
}

C2 variation(const FieldEval& e, const C2& Z, const C2& d) {
  Vec3 dn = 2.0 * pauli_pairing_re(Z, d);
  U2 dG = pauli_combo(e.H * dn);
  double df = e.g.dot(dn);
  double dzgz = 2.0 * Z.dot(e.G * d).real() + Z.dot(dG * Z).real();
  return -kI * (dG * Z + e.G * d + (df - dzgz) * Z + (e.f - e.zgz) * d);
}

void pack(const C2& v, double* out) {
  out[0] = v(0).real();
  out[1] = v(0).imag();
  out[2] = v(1).real();
  out[3] = v(1).imag();
}
C2 unpack(const double* in) { return {cplx(in[0], in[1]), cplx(in[2], in[3])}; }

Vec read_tangent(const HeisenbergChart& ch, const C2& Zend, const C2& dZ) {
  C2 W = ch.unitary().adjoint() * Zend;
  C2 dW = ch.unitary().adjoint() * dZ;
  cplx dv = (dW(1) * W(0) - W(1) * dW(0)) / (W(0) * W(0));
  Vec v(2);
  v << dv.real(), dv.imag();
  return v;
}

}  // namespace

Hamiltonian quadratic_hamiltonian(const std::string& name, double c0, const Vec3& b, const Mat3& Cin) {
  Mat3 C = 0.5 * (Cin + Cin.transpose());
  Hamiltonian h;
  h.name = name;
  h.f = [=](const Vec3& n) { return c0 + b.dot(n) + n.dot(C * n); };
  h.grad = [=](const Vec3& n) { return Vec3(b + 2.0 * C * n); };
  h.hess = [=](const Vec3&) { return Mat3(2.0 * C); };
  double tr = C.trace() / 3.0;
  h.compatible = (C - tr * Mat3::Identity()).norm() < 1e-14;
  if (h.compatible) {
    U2 H = pauli_combo(b);
    H += cplx(c0 + tr, 0.0) * U2::Identity();
    h.generator = H;
  }
  h.params["c0"] = c0;
  for (int i = 0; i < 3; ++i) {
    h.params["b" + std::to_string(i)] = b(i);
    for (int j = 0; j < 3; ++j) h.params["C" + std::to_string(i) + std::to_string(j)] = C(i, j);
  }
  return h;
}

Hamiltonian make_hamiltonian(const std::string& id, const std::map<std::string, double>& p) {
  auto get = [&](const std::string& key, double def) {
    auto it = p.find(key);
    return it == p.end() ? def : it->second;
  };
  for (auto& [key, val] : p) {
    (void)val;
    bool known = false;
    if (id == "rotation") known = key == "frequency" || key == "offset";
    else if (id == "perturbed-rotation") known = key == "epsilon";
    else known = key == "c0" || (key.size() == 2 && key[0] == 'b') || (key.size() == 3 && key[0] == 'C');
    if (!known) throw ArgumentError("unknown parameter '" + key + "' for hamiltonian '" + id + "'");
  }
  if (id == "rotation") {
    double w = get("frequency", 1.0);
    Hamiltonian h = quadratic_hamiltonian(id, get("offset", 0.0), Vec3(0.0, 0.0, 0.5 * w), Mat3::Zero());
    h.params = {{"frequency", w}, {"offset", get("offset", 0.0)}};
    return h;
  }
  if (id == "perturbed-rotation") {
    double eps = get("epsilon", 0.3);
    Mat3 C = Mat3::Zero();
    C(0, 0) = 0.25 * eps;
    Hamiltonian h = quadratic_hamiltonian(id, 0.0, Vec3(0.0, 0.0, 0.5), C);
    h.params = {{"epsilon", eps}};
    return h;
  }
  if (id == "quadratic") {
    Vec3 b(get("b0", 0.0), get("b1", 0.0), get("b2", 0.0));
    Mat3 C;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) C(i, j) = get("C" + std::to_string(i) + std::to_string(j), 0.0);
    return quadratic_hamiltonian(id, get("c0", 0.0), b, C);
  }
  throw ArgumentError("unknown hamiltonian id '" + id + "'");
}

Hamiltonian custom_hamiltonian(const std::string& name, std::function<double(const Vec3&)> f,
                               std::function<Vec3(const Vec3&)> grad, std::function<Mat3(const Vec3&)> hess) {
  Hamiltonian h;
  h.name = name;
  h.f = std::move(f);
  h.grad = std::move(grad);
  h.hess = std::move(hess);
  h.compatible = false;
  return h;
}

C2 contact_field(const Hamiltonian& ham, const C2& Z) { return eval_field(ham, Z, false).V; }

Vec hamiltonian_field(const Hamiltonian& ham, const HeisenbergChart& chart) {
  C2 Z = chart.unitary().col(0);
  return read_tangent(chart, Z, contact_field(ham, Z));
}

C2 exact_contact_flow(const Hamiltonian& ham, const C2& Z, double tau) {
  if (!ham.generator) throw PreconditionError("exact flow requires a compatible hamiltonian");
  U2 M = (cplx(0.0, -tau) * (*ham.generator)).exp();
  return M * Z;
}

ContactTrajectory integrate_contact(const Hamiltonian& ham, const C2& Z, double tau, const C2* tangents,
                                    const FlowOptions& opt) {
  ContactTrajectory out;
  out.start = Z;
  out.hasTangents = tangents != nullptr;
  const int dim = tangents ? 12 : 4;
  using State = std::vector<double>;
  State x(dim);
  pack(Z, x.data());
  if (tangents) {
    pack(tangents[0], x.data() + 4);
    pack(tangents[1], x.data() + 8);
  }
  const double sgn = tau < 0 ? -1.0 : 1.0;
  const double T = std::abs(tau);

  auto sys = [&](const State& s, State& ds, double) {
    C2 P = unpack(s.data());
    FieldEval e = eval_field(ham, P, tangents != nullptr);
    pack(sgn * e.V, ds.data());
    if (tangents) {
      pack(sgn * variation(e, P, unpack(s.data() + 4)), ds.data() + 4);
      pack(sgn * variation(e, P, unpack(s.data() + 8)), ds.data() + 8);
    }
  };

  int lead = std::abs(Z(0)) >= std::abs(Z(1)) ? 0 : 1;
  double phase = std::arg(Z(lead));
  const double phase0 = phase;
  auto track = [&](const C2& P) {
    if (std::abs(P(lead)) < 0.3) {
      int other = 1 - lead;
      // e^{iθ_other} = (Z_other/|Z_other|) relative to the current frame phase
      cplx c = (P(other) / std::abs(P(other))) / (P(lead) / std::abs(P(lead)));
      phase += std::arg(c);
      lead = other;
    }
    double a = std::arg(P(lead));
    phase += std::remainder(a - phase, 2.0 * kPi);
  };

  if (T > 0.0) {
    auto stepper = odeint::make_dense_output(opt.tol, opt.tol, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(x, 0.0, std::min(T, 1e-2));
    const double minStep = 1e-15 * std::max(1.0, T);
    while (stepper.current_time() < T) {
      auto [t0, t1] = stepper.do_step(sys);
      if (t1 - t0 < minStep) {
        std::ostringstream os;
        os << "integration step collapsed at t=" << sgn * t0 << " from Z=(" << Z(0) << "," << Z(1) << ")";
        throw IntegrationError(os.str());
      }
      if (++out.steps > opt.maxSteps) throw IntegrationError("integration exceeded the step budget");
      if (opt.trackPhase && t1 < T) track(unpack(stepper.current_state().data()));
    }
    stepper.calc_state(T, x);
  }
  C2 E = unpack(x.data());
  double nrm = E.norm();
  out.end = E / nrm;
  if (tangents) {
    out.tangentEnd[0] = unpack(x.data() + 4);
    out.tangentEnd[1] = unpack(x.data() + 8);
  }
  if (opt.trackPhase) {
    track(out.end);
    out.accumulatedPhase = phase - phase0;
  }
  return out;
}

HeisenbergChart target_chart(const HeisenbergChart& source, const C2& xt, double tol) {
  C2 x = source.unitary().col(0);
  if (dist_M(x, xt) < tol) return source.translated(std::arg(x.dot(xt)));
  return HeisenbergChart(CirclePoint::fromC2(xt), false);
}

FlowResult flow(const Hamiltonian& ham, const C2& Zin, double tau, double tol) {
  C2 Z = Zin / Zin.norm();
  HeisenbergChart src(CirclePoint::fromC2(Z), false);
  C2 tan[2] = {src.tangent((Vec(2) << 1.0, 0.0).finished()), src.tangent((Vec(2) << 0.0, 1.0).finished())};
  FlowOptions opt;
  opt.tol = tol;
  ContactTrajectory tr = integrate_contact(ham, src.unitary().col(0), tau, tan, opt);
  HeisenbergChart tgt = target_chart(src, tr.end);
  FlowResult r;
  r.start = src.unitary().col(0);
  r.end = tr.end;
  r.tau = tau;
  r.steps = tr.steps;
  r.differential.resize(2, 2);
  for (int j = 0; j < 2; ++j) r.differential.col(j) = read_tangent(tgt, tr.end, tr.tangentEnd[j]);
  return r;
}

ContactLiftResult contact_lift(const Hamiltonian& ham, const CirclePoint& x, double tau, double tol) {
  FlowOptions opt;
  opt.tol = tol;
  opt.trackPhase = true;
  ContactTrajectory tr = integrate_contact(ham, x.toC2(), tau, nullptr, opt);
  ContactLiftResult r;
  r.endC2 = tr.end;
  r.end = CirclePoint::fromC2(tr.end);
  r.accumulatedPhase = tr.accumulatedPhase;
  return r;
}

ReturnMap return_map(const Hamiltonian& ham, const C2& xin, double tau0, double tol) {
  C2 x = xin / xin.norm();
  HeisenbergChart src(CirclePoint::fromC2(x), false);
  C2 tan[2] = {src.tangent((Vec(2) << 1.0, 0.0).finished()), src.tangent((Vec(2) << 0.0, 1.0).finished())};
  ContactTrajectory tr;
  if (ham.generator) {
    // linear on C², so tangent vectors move by the same unitary
    U2 E = (kI * tau0 * (*ham.generator)).exp();
    tr.end = E * x;
    for (int j = 0; j < 2; ++j) tr.tangentEnd[j] = E * tan[j];
  } else {
    FlowOptions opt;
    opt.tol = tol;
    tr = integrate_contact(ham, x, -tau0, tan, opt);
  }
  HeisenbergChart tgt = target_chart(src, tr.end);
  ReturnMap rm{x, tr.end, src, tgt, Mat(2, 2), false, {1.0, 0.0}};
  for (int j = 0; j < 2; ++j) rm.A.col(j) = read_tangent(tgt, tr.end, tr.tangentEnd[j]);
  rm.sameFiber = dist_M(x, tr.end) < 1e-9;
  if (rm.sameFiber) rm.holonomy = x.dot(tr.end);
  return rm;
}

std::vector<C2> sphere_grid(int n) {
  std::vector<C2> pts;
  pts.reserve(n);
  const double ga = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.push_back(bloch_to_c2(Vec3(r * std::cos(ga * i), r * std::sin(ga * i), z)));
  }
  return pts;
}

namespace {

void tangent_basis(const Vec3& n, Vec3& e1, Vec3& e2) {
  Vec3 a = std::abs(n(0)) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  e1 = (a - a.dot(n) * n).normalized();
  e2 = n.cross(e1);
}

double tangential_grad_norm(const Hamiltonian& ham, const Vec3& n) {
  Vec3 g = ham.grad(n);
  return (g - g.dot(n) * n).norm();
}

}  // namespace

std::vector<C2> critical_points(const Hamiltonian& ham, int grid) {
  std::vector<C2> lifts = sphere_grid(grid);
  std::vector<Vec3> pts;
  std::vector<double> gn;
  for (auto& Z : lifts) {
    pts.push_back(c2_to_bloch(Z));
    gn.push_back(tangential_grad_norm(ham, pts.back()));
  }
  const double rad = 3.0 * std::sqrt(4.0 * kPi / grid);
  std::vector<Vec3> found;
  for (int i = 0; i < grid; ++i) {
    bool localMin = true;
    for (int j = 0; j < grid && localMin; ++j)
      if (j != i && (pts[i] - pts[j]).norm() < rad && gn[j] < gn[i]) localMin = false;
    if (!localMin) continue;
    Vec3 n = pts[i];
    for (int it = 0; it < 60; ++it) {
      Vec3 e1, e2;
      tangent_basis(n, e1, e2);
      Vec3 g = ham.grad(n);
      Mat3 H = ham.hess(n);
      Eigen::Matrix<double, 3, 2> E;
      E << e1, e2;
      Eigen::Vector2d gr = E.transpose() * g;
      if (gr.norm() < 1e-15) break;
      Eigen::Matrix2d Hs = E.transpose() * H * E - g.dot(n) * Eigen::Matrix2d::Identity();
      Eigen::Vector2d t = -Hs.fullPivLu().solve(gr);
      if (!t.allFinite()) break;
      if (t.norm() > 0.2) t *= 0.2 / t.norm();
      n = (n + E * t).normalized();
    }
    if (tangential_grad_norm(ham, n) > 1e-10) continue;
    bool dup = false;
    for (auto& m : found)
      if ((m - n).norm() < 1e-6) dup = true;
    if (!dup) found.push_back(n);
  }
  std::sort(found.begin(), found.end(), [](const Vec3& a, const Vec3& b) { return a(2) > b(2); });
  std::vector<C2> out;
  for (auto& n : found) out.push_back(bloch_to_c2(n));
  return out;
}

Mat hessian_at(const Hamiltonian& ham, const C2& q) {
  HeisenbergChart ch(CirclePoint::fromC2(q), false);
  C2 Z = ch.unitary().col(0);
  Vec3 n = c2_to_bloch(Z);
  Eigen::Matrix<double, 3, 2> J;
  for (int j = 0; j < 2; ++j) {
    Vec e = Vec::Zero(2);
    e(j) = 1.0;
    J.col(j) = 2.0 * pauli_pairing_re(Z, ch.tangent(e));
  }
  Vec3 g = ham.grad(n);
  Mat H = J.transpose() * ham.hess(n) * J - g.dot(n) * (J.transpose() * J);
  return 0.5 * (H + H.transpose());
}

PeriodProfile classify_period(const Hamiltonian& ham, double tau0, const ClassifyOptions& opt) {
  PeriodProfile prof;
  prof.tau0 = tau0;
  const KahlerModel model = cp1_model();
  auto crit = critical_points(ham);

  auto critical_entry = [&](const C2& q, bool withHessian) {
    CriticalData cd;
    cd.point = q;
    cd.fab = ham.value(q);
    HeisenbergChart ch(CirclePoint::fromC2(q), false);
    cd.fieldNorm = hamiltonian_field(ham, ch).norm();
    if (withHessian) {
      cd.transverseHessian = hessian_at(ham, q);
      cd.detAbs = std::abs(cd.transverseHessian.determinant());
      Eigen::SelfAdjointEigenSolver<Mat> es(cd.transverseHessian);
      for (int i = 0; i < es.eigenvalues().size(); ++i) cd.signature += es.eigenvalues()(i) > 0 ? 1 : -1;
    } else {
      cd.transverseHessian = Mat(0, 0);
    }
    return cd;
  };

  std::vector<C2> samples = sphere_grid(opt.gridSize);
  std::vector<C2> images(samples.size());
  if (tau0 == 0.0) {
    images = samples;
  } else {
    parallel_for(samples.size(), [&](std::size_t i) {
      FlowOptions fo;
      fo.tol = opt.tol;
      images[i] = ham.generator ? exact_contact_flow(ham, samples[i], -tau0)
                                : integrate_contact(ham, samples[i], -tau0, nullptr, fo).end;
    });
  }
  std::vector<int> fixedIdx, ambiguous;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double dd = dist_M(samples[i], images[i]);
    if (dd < opt.fixedThreshold * model.diameter()) fixedIdx.push_back(static_cast<int>(i));
    else if (dd <= opt.movedThreshold) ambiguous.push_back(static_cast<int>(i));
  }
  if (!ambiguous.empty()) {
    std::ostringstream os;
    os << "ambiguous fixed-locus detection at tau0=" << tau0 << " for samples:";
    for (std::size_t j = 0; j < std::min<std::size_t>(ambiguous.size(), 10); ++j) os << ' ' << ambiguous[j];
    throw ClassificationError(os.str());
  }

  prof.clean = true;
  prof.veryClean = true;
  prof.morseBott = true;

  if (fixedIdx.size() == samples.size()) {
    FixedComponent fc;
    fc.wholeManifold = true;
    fc.dim2 = 2;
    cplx hsum{0.0, 0.0};
    std::vector<cplx> hs;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      hs.push_back(samples[i].dot(images[i]));
      hsum += hs.back();
    }
    fc.holonomy = hsum / std::abs(hsum);
    for (auto& h : hs) fc.holonomySpread = std::max(fc.holonomySpread, std::abs(h - fc.holonomy));
    if (fc.holonomySpread > 1e-6) throw ClassificationError("holonomy is not constant on the fixed component");
    for (std::size_t i = 0; i < samples.size(); i += std::max<std::size_t>(1, samples.size() / 8)) {
      fc.samples.push_back(samples[i]);
      if (tau0 != 0.0) {
        ReturnMap rm = return_map(ham, samples[i], tau0, opt.tol);
        Splitting sp = symplectic_splitting(SymplecticMap{1, rm.A}, 1e-6);
        if (sp.ker.cols() != 2) prof.clean = false;
        if (!sp.veryClean) prof.veryClean = false;
      }
    }
    for (auto& q : crit) {
      CriticalData cd = critical_entry(q, true);
      if (cd.detAbs < 1e-8) prof.morseBott = false;
      fc.critical.push_back(cd);
    }
    prof.components.push_back(fc);
  } else {
    for (auto& q : crit) {
      ReturnMap rm = return_map(ham, q, tau0, opt.tol);
      if (!rm.sameFiber) throw ConsistencyError("critical point is not fixed by the flow");
      FixedComponent fc;
      fc.samples = {q};
      fc.dim2 = 0;
      fc.holonomy = rm.holonomy / std::abs(rm.holonomy);
      Splitting sp = symplectic_splitting(SymplecticMap{1, rm.A});
      if (sp.ker.cols() != 0) prof.clean = false;
      if (!sp.veryClean) prof.veryClean = false;
      fc.critical.push_back(critical_entry(q, false));
      prof.components.push_back(fc);
    }
    // fixed samples away from critical points: a positive-dimensional locus other than M
    std::vector<C2> stray;
    for (int i : fixedIdx) {
      bool nearCrit = false;
      for (auto& q : crit)
        if (dist_M(samples[i], q) < 1e-6) nearCrit = true;
      if (!nearCrit) stray.push_back(samples[i]);
    }
    if (!stray.empty()) {
      FixedComponent fc;
      fc.samples = stray;
      ReturnMap rm = return_map(ham, stray.front(), tau0, opt.tol);
      fc.dim2 = static_cast<int>(symplectic_splitting(SymplecticMap{1, rm.A}).ker.cols());
      fc.holonomy = rm.holonomy;
      prof.components.push_back(fc);
      prof.clean = false;
      prof.veryClean = false;
    }
  }
  if (!prof.veryClean) prof.morseBott = false;
  return prof;
}

}  // namespace btlab
