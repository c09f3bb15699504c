#pragma once

// Small sparse multivariate polynomial with real coefficients; enough for the
// model phase and for differentiating Gaussian Fourier transforms.

#include <cmath>
#include <map>
#include <vector>

namespace btlab::detail {

class Poly {
 public:
  using Exp = std::vector<int>;

  explicit Poly(int nvars) : n_(nvars) {}

  static Poly constant(int nvars, double c) {
    Poly p(nvars);
    p.add(Exp(nvars, 0), c);
    return p;
  }
  static Poly variable(int nvars, int i) {
    Poly p(nvars);
    Exp e(nvars, 0);
    e[i] = 1;
    p.add(e, 1.0);
    return p;
  }

  int nvars() const { return n_; }
  const std::map<Exp, double>& terms() const { return t_; }

  void add(const Exp& e, double c) {
    if (c == 0.0) return;
    double& slot = t_[e];
    slot += c;
    if (slot == 0.0) t_.erase(e);
  }

  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (auto& [e, c] : o.t_) r.add(e, c);
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + o * -1.0; }
  Poly operator*(double s) const {
    Poly r(n_);
    for (auto& [e, c] : t_) r.add(e, c * s);
    return r;
  }
  Poly operator*(const Poly& o) const {
    Poly r(n_);
    for (auto& [e1, c1] : t_)
      for (auto& [e2, c2] : o.t_) {
        Exp e(n_);
        for (int i = 0; i < n_; ++i) e[i] = e1[i] + e2[i];
        r.add(e, c1 * c2);
      }
    return r;
  }

  Poly diff(int i) const {
    Poly r(n_);
    for (auto& [e, c] : t_) {
      if (e[i] == 0) continue;
      Exp f = e;
      f[i] -= 1;
      r.add(f, c * e[i]);
    }
    return r;
  }

  template <class V>
  double eval(const V& x) const {
    double s = 0.0;
    for (auto& [e, c] : t_) {
      double m = c;
      for (int i = 0; i < n_; ++i)
        if (e[i]) m *= std::pow(x[i], e[i]);
      s += m;
    }
    return s;
  }

 private:
  int n_;
  std::map<Exp, double> t_;
};

}  // namespace btlab::detail
