#include "btlab/quantization.hpp"

#include <Eigen/Cholesky>
#include <boost/math/special_functions/legendre.hpp>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace btlab {

namespace {

// |e_l(Z)| in log form for Z = (a, b e^{iφ}) with a, b ≥ 0.
Vec ref_magnitudes(const QuantumLevel& L, double a, double b) {
  Vec out(L.k + 1);
  const double la = std::log(a), lb = std::log(b);
  for (int l = 0; l <= L.k; ++l) {
    double s = L.logBinomHalf[l];
    if (L.k - l) s += (L.k - l) * la;
    if (l) s += l * lb;
    out(l) = std::exp(s);
  }
  return out;
}

// F(q) = Σ_c x_c e^{iqφ_c} for q = −k..k, returned at index q + k.
CVec angular_sums(Eigen::FFT<double>& fft, const std::vector<cplx>& x, int k) {
  std::vector<cplx> X;
  fft.fwd(X, x);
  const int n = static_cast<int>(x.size());
  CVec F(2 * k + 1);
  for (int q = -k; q <= k; ++q) F(q + k) = X[((-q) % n + n) % n];
  return F;
}

void require_resolution(const QuantumLevel& L) {
  if (L.quad.nr < L.k / 2 + 1 || L.quad.nphi < 2 * L.k + 1)
    throw ResolutionError("quadrature under-resolved for k=" + std::to_string(L.k));
}

}  // namespace

C2 Quadrature::lift(int r, int c) const { return {a[r], std::polar(b[r], phi(c))}; }

Quadrature cp1_quadrature(int nr, int nphi) {
  if (nr < 1 || nphi < 1) throw ArgumentError("quadrature sizes must be positive");
  Quadrature q;
  q.nr = nr;
  q.nphi = nphi;
  std::vector<double> pos = boost::math::legendre_p_zeros<double>(nr);
  std::vector<double> xs, ws;
  for (double x : pos) {
    double dp = boost::math::legendre_p_prime(nr, x);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    if (x == 0.0) {
      xs.push_back(0.0);
      ws.push_back(w);
    } else {
      xs.push_back(x);
      ws.push_back(w);
      xs.push_back(-x);
      ws.push_back(w);
    }
  }
  std::vector<std::size_t> idx(xs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
  const double ang = 2.0 * kPi / nphi;
  for (std::size_t i : idx) {
    q.n3.push_back(xs[i]);
    q.wr.push_back(0.25 * ang * ws[i]);
    q.a.push_back(std::sqrt(0.5 * (1.0 + xs[i])));
    q.b.push_back(std::sqrt(0.5 * (1.0 - xs[i])));
  }
  return q;
}

CVec QuantumLevel::reference(const C2& Z) const {
  CVec e(k + 1);
  const double a = std::abs(Z(0)), b = std::abs(Z(1));
  const double pa = std::arg(Z(0)), pb = std::arg(Z(1));
  for (int l = 0; l <= k; ++l) {
    if ((k - l && a == 0.0) || (l && b == 0.0)) {
      e(l) = 0.0;
      continue;
    }
    double s = logBinomHalf[l];
    if (k - l) s += (k - l) * std::log(a);
    if (l) s += l * std::log(b);
    e(l) = std::polar(std::exp(s), (k - l) * pa + l * pb);
  }
  return e;
}

CVec QuantumLevel::sections(const C2& Z) const { return basis.transpose() * reference(Z); }

QuantumLevel level(const KahlerModel&, int k, const LevelOptions& opt) {
  if (k < 1) throw ArgumentError("level: k must be >= 1");
  QuantumLevel L;
  L.k = k;
  const int nodes = opt.nodes > 0 ? opt.nodes : 2 * k + 16;
  L.quad = cp1_quadrature(nodes, nodes);
  require_resolution(L);
  L.logBinomHalf.resize(k + 1);
  for (int l = 0; l <= k; ++l)
    L.logBinomHalf[l] = 0.5 * (std::lgamma(k + 1.0) - std::lgamma(l + 1.0) - std::lgamma(k - l + 1.0));

  const int N = k + 1;
  const int nr = L.quad.nr;
  Mat E(nr, N);
  for (int r = 0; r < nr; ++r) E.row(r) = ref_magnitudes(L, L.quad.a[r], L.quad.b[r]).transpose();
  Vec w = Eigen::Map<const Vec>(L.quad.wr.data(), nr);
  Mat radial = E.transpose() * w.asDiagonal() * E;

  std::vector<cplx> ones(L.quad.nphi, cplx(1.0, 0.0));
  Eigen::FFT<double> fft;
  CVec D = angular_sums(fft, ones, k);
  L.gram.resize(N, N);
  for (int l = 0; l < N; ++l)
    for (int m = 0; m < N; ++m) L.gram(l, m) = radial(l, m) * D(m - l + k);

  // unpivoted Cholesky keeps the basis triangular in the reference order
  Eigen::SelfAdjointEigenSolver<CMat> es(L.gram, Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues();
  Eigen::LLT<CMat> llt(L.gram);
  if (llt.info() != Eigen::Success || ev.minCoeff() <= 0.0)
    throw ResolutionError("level: Gram matrix is not positive definite");
  L.gramCondition = ev.maxCoeff() / ev.minCoeff();
  if (L.gramCondition > opt.conditionGuard)
    throw ResolutionError("level: Gram condition number " + std::to_string(L.gramCondition) + " exceeds the guard");
  L.basis = llt.matrixU().solve(CMat::Identity(N, N));
  L.Nk = N;

  // reproducing normalization at (1,0): c_k = 1 / ∫|Z0|^{2k} dV
  double s = 0.0;
  for (int r = 0; r < nr; ++r) s += L.quad.wr[r] * L.quad.nphi * std::pow(L.quad.a[r], 2 * k);
  L.szegoConstant = 1.0 / s;
  return L;
}

cplx szego_eval(const QuantumLevel& L, const C2& x, const C2& y) {
  return L.sections(x).transpose() * L.sections(y).conjugate();
}

cplx szego_closed_form(const QuantumLevel& L, const C2& x, const C2& y) {
  cplx ip = y.dot(x);  // Σ x_i conj(y_i)
  return L.szegoConstant * std::polar(std::pow(std::abs(ip), L.k), L.k * std::arg(ip));
}

OperatorMatrix szego(const QuantumLevel& L) {
  OperatorMatrix op;
  op.k = L.k;
  op.entries = CMat::Identity(L.Nk, L.Nk);
  op.kind = OperatorKind::Szego;
  op.label = "szego";
  return op;
}

namespace {

CMat reference_toeplitz(const QuantumLevel& L, const Symbol& g) {
  const int N = L.Nk, k = L.k, nr = L.quad.nr, nphi = L.quad.nphi;
  std::vector<CMat> parts(nr);
  parallel_for(nr, [&](std::size_t r) {
    Eigen::FFT<double> fft;
    const double n3 = L.quad.n3[r], rad = std::sqrt(std::max(0.0, 1.0 - n3 * n3));
    std::vector<cplx> vals(nphi);
    for (int c = 0; c < nphi; ++c) {
      double ph = L.quad.phi(c);
      vals[c] = g(Vec3(rad * std::cos(ph), rad * std::sin(ph), n3));
    }
    CVec F = angular_sums(fft, vals, k);
    Vec e = ref_magnitudes(L, L.quad.a[r], L.quad.b[r]);
    CMat P(N, N);
    for (int l = 0; l < N; ++l)
      for (int m = 0; m < N; ++m) P(l, m) = L.quad.wr[r] * e(l) * e(m) * F(m - l + k);
    parts[r] = std::move(P);
  });
  CMat T = CMat::Zero(N, N);
  for (auto& P : parts) T += P;
  return T;
}

bool diagonal_generator(const Hamiltonian& ham) {
  return ham.generator && std::abs((*ham.generator)(0, 1)) < 1e-14 && std::abs((*ham.generator)(1, 0)) < 1e-14;
}

}  // namespace

OperatorMatrix toeplitz(const QuantumLevel& L, const Symbol& g) {
  require_resolution(L);
  OperatorMatrix op;
  op.k = L.k;
  op.kind = OperatorKind::Toeplitz;
  op.label = "toeplitz";
  op.entries = L.basis.adjoint() * reference_toeplitz(L, g) * L.basis;
  return op;
}

CMat pullback_matrix_quadrature(const QuantumLevel& L, const Hamiltonian& ham, double tau, double tol) {
  require_resolution(L);
  const int N = L.Nk, nr = L.quad.nr, nphi = L.quad.nphi;
  std::vector<CMat> parts(nr);
  parallel_for(nr, [&](std::size_t r) {
    Eigen::FFT<double> fft;
    FlowOptions fo;
    fo.tol = tol;
    CMat V(nphi, N);
    for (int c = 0; c < nphi; ++c) {
      C2 Z = L.quad.lift(static_cast<int>(r), c);
      C2 Y = ham.generator ? exact_contact_flow(ham, Z, -tau) : integrate_contact(ham, Z, -tau, nullptr, fo).end;
      V.row(c) = L.reference(Y).transpose();
    }
    Vec e = ref_magnitudes(L, L.quad.a[r], L.quad.b[r]);
    CMat P(N, N);
    std::vector<cplx> col(nphi), X;
    for (int m = 0; m < N; ++m) {
      for (int c = 0; c < nphi; ++c) col[c] = V(c, m);
      fft.fwd(X, col);
      for (int l = 0; l < N; ++l) P(l, m) = L.quad.wr[r] * e(l) * X[l];
    }
    parts[r] = std::move(P);
  });
  CMat E = CMat::Zero(N, N);
  for (auto& P : parts) E += P;
  return L.basis.adjoint() * E * L.basis;
}

OperatorMatrix evolution(const QuantumLevel& L, const Hamiltonian& ham, double tau, const SymbolFamily& rho,
                         const EvolutionOptions& opt) {
  OperatorMatrix op;
  op.k = L.k;
  op.kind = OperatorKind::Evolution;
  op.label = ham.name + "@" + std::to_string(tau);
  CMat V;
  if (opt.allowFastPath && diagonal_generator(ham)) {
    const double h0 = (*ham.generator)(0, 0).real(), h1 = (*ham.generator)(1, 1).real();
    CVec lam(L.Nk);
    for (int m = 0; m <= L.k; ++m) lam(m) = std::polar(1.0, tau * ((L.k - m) * h0 + m * h1));
    V = L.basis.adjoint() * L.gram * lam.asDiagonal() * L.basis;
    op.fastPath = true;
    if (opt.crossCheck && L.k <= 64) {
      CMat Q = pullback_matrix_quadrature(L, ham, tau, opt.tol);
      double diff = (Q - V).cwiseAbs().maxCoeff();
      if (diff > 1e-6)
        throw ConsistencyError("fast path and quadrature evolution disagree by " + std::to_string(diff));
    }
  } else {
    V = pullback_matrix_quadrature(L, ham, tau, opt.tol);
  }
  if (rho) {
    Symbol g = [&](const Vec3& n) { return rho(tau, n); };
    op.entries = toeplitz(L, g).entries * V;
  } else {
    op.entries = std::move(V);
  }
  return op;
}

cplx kernel_eval(const QuantumLevel& L, const OperatorMatrix& op, const C2& x, const C2& y) {
  if (op.k != L.k) throw ArgumentError("kernel_eval: operator and level differ in k");
  return (L.sections(x).transpose() * op.entries * L.sections(y).conjugate())(0, 0);
}

cplx trace(const OperatorMatrix& op) { return op.entries.trace(); }

cplx diagonal_trace_integral(const QuantumLevel& L, const Hamiltonian& ham, double tau, const SymbolFamily& rho,
                             double tol, int nodes) {
  Quadrature q = nodes > 0 ? cp1_quadrature(nodes, nodes) : L.quad;
  const int k = L.k;
  std::vector<cplx> rows(q.nr);
  parallel_for(q.nr, [&](std::size_t r) {
    FlowOptions fo;
    fo.tol = tol;
    cplx s{0.0, 0.0};
    for (int c = 0; c < q.nphi; ++c) {
      C2 Z = q.lift(static_cast<int>(r), c);
      C2 Y = ham.generator ? exact_contact_flow(ham, Z, -tau) : integrate_contact(ham, Z, -tau, nullptr, fo).end;
      cplx ip = Z.dot(Y);
      cplx val = std::polar(std::pow(std::abs(ip), k), k * std::arg(ip));
      if (rho) val *= rho(tau, c2_to_bloch(Z));
      s += val;
    }
    rows[r] = q.wr[r] * s;
  });
  cplx total{0.0, 0.0};
  for (auto& v : rows) total += v;
  return L.szegoConstant * total;
}

cplx exact_weight_trace(const Hamiltonian& ham, int k, double tau) {
  if (!ham.generator) throw PreconditionError("exact_weight_trace requires a compatible hamiltonian");
  Eigen::SelfAdjointEigenSolver<U2> es(*ham.generator);
  const double h0 = es.eigenvalues()(1), h1 = es.eigenvalues()(0);
  cplx s{0.0, 0.0};
  for (int j = 0; j <= k; ++j) s += std::polar(1.0, tau * ((k - j) * h0 + j * h1));
  return s;
}

std::string to_csv(const CMat& M) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (int j = 0; j < M.cols(); ++j) os << (j ? "," : "") << "c" << j << "_re,c" << j << "_im";
  os << "\n";
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) os << (j ? "," : "") << M(i, j).real() << "," << M(i, j).imag();
    os << "\n";
  }
  return os.str();
}

void export_csv(const CMat& M, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot open " + path + " for writing");
  f << to_csv(M);
}

}  // namespace btlab
