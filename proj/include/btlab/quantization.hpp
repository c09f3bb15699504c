#pragma once

#include "btlab/common.hpp"
#include "btlab/dynamics.hpp"
#include "btlab/geometry.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace btlab {

// Gauss–Legendre in n₃ times uniform in the angle. Lifts are the gauge
// Z = (√((1+n₃)/2), √((1−n₃)/2)e^{iφ}); integrands are circle-invariant so the
// fiber carries unit mass: ∫_X F dV_X = ∫_M F dV_M, dV_M = ¼ dn₃ dφ.
struct Quadrature {
  int nr = 0;
  int nphi = 0;
  std::vector<double> n3;
  std::vector<double> wr;  // includes the ¼ and the angular step
  std::vector<double> a;   // √((1+n₃)/2)
  std::vector<double> b;   // √((1−n₃)/2)

  C2 lift(int r, int c) const;
  double phi(int c) const { return 2.0 * kPi * c / nphi; }
};

Quadrature cp1_quadrature(int nr, int nphi);

struct QuantumLevel {
  int k = 0;
  int Nk = 0;
  CMat basis;  // s_j = Σ_l e_l basis(l, j), e_l = √C(k,l) Z0^{k−l} Z1^l
  CMat gram;   // ⟨e_m, e_l⟩ at (l, m)
  Quadrature quad;
  double gramCondition = 0.0;
  double szegoConstant = 0.0;  // c_k in Π_k(x,y) = c_k⟨x,y⟩^k
  std::vector<double> logBinomHalf;  // ½ log C(k,l)

  CVec reference(const C2& Z) const;
  CVec sections(const C2& Z) const;
};

struct LevelOptions {
  int nodes = 0;  // per axis; 0 selects 2k+16
  double conditionGuard = 1e12;
};

QuantumLevel level(const KahlerModel& model, int k, const LevelOptions& opt = {});

cplx szego_eval(const QuantumLevel& L, const C2& x, const C2& y);
cplx szego_closed_form(const QuantumLevel& L, const C2& x, const C2& y);

using Symbol = std::function<cplx(const Vec3& n)>;
using SymbolFamily = std::function<cplx(double tau, const Vec3& n)>;

enum class OperatorKind { Szego, Toeplitz, Evolution };

struct OperatorMatrix {
  int k = 0;
  CMat entries;  // U(s_j) = Σ_i entries(i, j) s_i
  OperatorKind kind = OperatorKind::Szego;
  std::string label;
  bool fastPath = false;
};

OperatorMatrix szego(const QuantumLevel& L);
OperatorMatrix toeplitz(const QuantumLevel& L, const Symbol& g);

struct EvolutionOptions {
  bool allowFastPath = true;
  bool crossCheck = false;  // compare the fast path with quadrature (k ≤ 64)
  double tol = 1e-10;
};

// U_{τ,k} = R_{τ,k} ∘ (φ^X_{−τ})^* ∘ Π_k with R_{τ,k} = Π_k M_{ϱ(τ,·)} Π_k.
// An empty symbol family means ϱ ≡ 1.
OperatorMatrix evolution(const QuantumLevel& L, const Hamiltonian& ham, double tau, const SymbolFamily& rho = {},
                         const EvolutionOptions& opt = {});

// Matrix of (φ^X_{−τ})^* on the level by quadrature.
CMat pullback_matrix_quadrature(const QuantumLevel& L, const Hamiltonian& ham, double tau, double tol = 1e-10);

cplx kernel_eval(const QuantumLevel& L, const OperatorMatrix& op, const C2& x, const C2& y);
cplx trace(const OperatorMatrix& op);

// ∫_X ϱ(τ,x) Π_k(φ^X_{−τ}x, x) dV_X on the level's quadrature (or a custom node count).
cplx diagonal_trace_integral(const QuantumLevel& L, const Hamiltonian& ham, double tau, const SymbolFamily& rho = {},
                             double tol = 1e-10, int nodes = 0);

// Exact trace of the compatible evolution with ϱ ≡ 1: Σ_j e^{iτ((k−j)h₀ + j h₁)}, h the
// eigenvalues of the generator.
cplx exact_weight_trace(const Hamiltonian& ham, int k, double tau);

void export_csv(const CMat& M, const std::string& path);
std::string to_csv(const CMat& M);

}  // namespace btlab
