#include "btlab/harness.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace btlab {

using nlohmann::json;

SymbolFamily SymbolSpec::family() const {
  if (trivial()) return {};
  const double a = c0;
  const Vec3 b = c;
  return [a, b](double, const Vec3& n) { return cplx(a + b.dot(n), 0.0); };
}

Symbol SymbolSpec::slice() const {
  if (trivial()) return {};
  const double a = c0;
  const Vec3 b = c;
  return [a, b](const Vec3& n) { return cplx(a + b.dot(n), 0.0); };
}

void ExperimentConfig::validate() const {
  if (model != "cp1") throw ArgumentError("unknown model '" + model + "'");
  if (ks.empty()) throw ArgumentError("k list is empty");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw ArgumentError("k values must be positive");
    if (i && ks[i] <= ks[i - 1]) throw ArgumentError("k list must be strictly increasing");
  }
  if (tau.values.empty()) throw ArgumentError("tau schedule is empty");
  if (tau.mode != "fixed" && tau.mode != "window") throw ArgumentError("tau mode must be 'fixed' or 'window'");
  if (rho.type != "constant" && rho.type != "affine") throw ArgumentError("rho type must be 'constant' or 'affine'");
  for (const auto& p : probes) {
    static const std::set<std::string> kinds{"fixed-point", "generic", "off-graph", "off-locus"};
    if (!kinds.count(p.kind)) throw ArgumentError("unknown probe kind '" + p.kind + "'");
    if (p.u.size() != 2 || p.w.size() != 2) throw ArgumentError("probe displacements must have 2 entries");
  }
  if (flowTol <= 0 || window <= 0 || errorFloor <= 0) throw ArgumentError("tolerances must be positive");
}

namespace {

Vec vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ArgumentError("expected a 2-vector");
  Vec v(2);
  v << j[0].get<double>(), j[1].get<double>();
  return v;
}

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ArgumentError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ArgumentError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ArgumentError("unknown key '" + it.key() + "' in " + where);
}

ProbeSpec probe_from_json(const json& j) {
  check_keys(j, {"name", "kind", "bloch", "chart", "fiberPhase", "u", "w", "tau", "separation", "expectedSlope"},
             "probe");
  ProbeSpec p;
  p.name = j.value("name", std::string("probe"));
  p.kind = j.value("kind", std::string("generic"));
  double phase = j.value("fiberPhase", 0.0);
  if (j.contains("bloch")) {
    p.point = bloch_to_c2(vec3(j["bloch"]));
  } else if (j.contains("chart")) {
    const json& c = j["chart"];
    check_keys(c, {"frame", "z"}, "probe chart");
    CirclePoint cp;
    cp.frameId = c.value("frame", 0);
    if (cp.frameId != 0 && cp.frameId != 1) throw ArgumentError("chart frame must be 0 or 1");
    Vec z = vec2(c.at("z"));
    cp.z = cplx(z(0), z(1));
    p.point = cp.toC2();
  }
  p.point *= std::polar(1.0, phase);
  if (j.contains("u")) p.u = vec2(j["u"]);
  if (j.contains("w")) p.w = vec2(j["w"]);
  if (p.kind == "fixed-point" && j.contains("u") && !j.contains("w")) p.w = p.u;
  p.tau = j.value("tau", 0.0);
  p.separation = j.value("separation", 0.3);
  p.expectedSlope = j.value("expectedSlope", 0.0);
  return p;
}

json cj(cplx z) { return json::array({z.real(), z.imag()}); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string o = "\"";
  for (char ch : s) {
    if (ch == '"') o += '"';
    o += ch;
  }
  return o + "\"";
}

double default_slope(const std::string& kind) {
  if (kind == "fixed-point") return -0.9;
  if (kind == "generic") return -0.4;
  return -6.0;
}

bool strictly_decreasing(const std::vector<ReportRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].error < rows[i - 1].error)) return false;
  return true;
}

std::vector<ProbeSpec> all_probes(const ExperimentConfig& cfg) {
  std::vector<ProbeSpec> out = cfg.probes;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int i = 0; i < cfg.randomProbes; ++i) {
    ProbeSpec p;
    p.name = "random" + std::to_string(i);
    p.kind = "generic";
    Vec3 n(nd(rng), nd(rng), nd(rng));
    p.point = bloch_to_c2(n);
    for (int j = 0; j < 2; ++j) {
      p.u(j) = cfg.randomRadius * ud(rng) / std::sqrt(2.0);
      p.w(j) = cfg.randomRadius * ud(rng) / std::sqrt(2.0);
    }
    p.tau = cfg.randomRadius * ud(rng);
    out.push_back(p);
  }
  return out;
}

cplx measured_trace(const QuantumLevel& L, const Hamiltonian& ham, double t, const ExperimentConfig& cfg) {
  if (ham.generator) {
    EvolutionOptions eo;
    eo.tol = cfg.flowTol;
    return trace(evolution(L, ham, t, cfg.rho.family(), eo));
  }
  return diagonal_trace_integral(L, ham, t, cfg.rho.family(), cfg.flowTol);
}

void finish_series(SeriesReport& s, const std::vector<int>& ks, double floorValue) {
  std::vector<double> errs;
  for (auto& r : s.rows) errs.push_back(std::max(r.error, floorValue));
  // short grids keep at least two points in the fit
  const int drop = std::clamp(static_cast<int>(ks.size()) - 2, 0, 2);
  s.fit = fit_slope(ks, errs, drop);
  s.monotone = strictly_decreasing(s.rows);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, {"model", "hamiltonian", "tau0", "tau", "k", "probes", "randomProbes", "rho", "tolerances", "output",
                 "seed", "description"},
             "config");
  ExperimentConfig c;
  try {
    c.model = j.value("model", c.model);
    if (j.contains("hamiltonian")) {
      const json& h = j["hamiltonian"];
      if (h.is_string()) {
        c.hamiltonian = h.get<std::string>();
      } else {
        check_keys(h, {"id", "params"}, "hamiltonian");
        c.hamiltonian = h.value("id", c.hamiltonian);
        if (h.contains("params"))
          for (auto it = h["params"].begin(); it != h["params"].end(); ++it) c.params[it.key()] = it.value().get<double>();
      }
    }
    c.tau0 = j.value("tau0", c.tau0);
    if (j.contains("tau")) {
      const json& t = j["tau"];
      if (t.is_number()) {
        c.tau.values = {t.get<double>()};
      } else {
        check_keys(t, {"mode", "values", "C"}, "tau");
        c.tau.mode = t.value("mode", c.tau.mode);
        if (t.contains("values")) c.tau.values = t["values"].get<std::vector<double>>();
        c.tau.C = t.value("C", 0.0);
      }
    }
    if (j.contains("k")) c.ks = j["k"].get<std::vector<int>>();
    if (j.contains("probes"))
      for (const auto& p : j["probes"]) c.probes.push_back(probe_from_json(p));
    if (j.contains("randomProbes")) {
      const json& r = j["randomProbes"];
      check_keys(r, {"count", "radius"}, "randomProbes");
      c.randomProbes = r.value("count", 0);
      c.randomRadius = r.value("radius", 1.0);
    }
    if (j.contains("rho")) {
      const json& r = j["rho"];
      check_keys(r, {"type", "c0", "c"}, "rho");
      c.rho.type = r.value("type", c.rho.type);
      c.rho.c0 = r.value("c0", 1.0);
      if (r.contains("c")) c.rho.c = vec3(r["c"]);
    }
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      check_keys(t, {"flow", "window", "expectedSlope", "exact", "errorFloor"}, "tolerances");
      c.flowTol = t.value("flow", c.flowTol);
      c.window = t.value("window", c.window);
      c.expectedSlope = t.value("expectedSlope", c.expectedSlope);
      c.exactTol = t.value("exact", c.exactTol);
      c.errorFloor = t.value("errorFloor", c.errorFloor);
    }
    if (j.contains("output")) {
      const json& o = j["output"];
      check_keys(o, {"csv", "json"}, "output");
      c.outCsv = o.value("csv", std::string());
      c.outJson = o.value("json", std::string());
    }
    if (j.contains("seed")) {
      c.seed = j["seed"].get<std::uint64_t>();
      c.seedGiven = true;
    }
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json probes = json::array();
  for (const auto& p : c.probes)
    probes.push_back({{"name", p.name},
                      {"kind", p.kind},
                      {"bloch", {c2_to_bloch(p.point)(0), c2_to_bloch(p.point)(1), c2_to_bloch(p.point)(2)}},
                      {"u", {p.u(0), p.u(1)}},
                      {"w", {p.w(0), p.w(1)}},
                      {"tau", p.tau},
                      {"separation", p.separation},
                      {"expectedSlope", p.expectedSlope}});
  return {{"model", c.model},
          {"hamiltonian", {{"id", c.hamiltonian}, {"params", c.params}}},
          {"tau0", c.tau0},
          {"tau", {{"mode", c.tau.mode}, {"values", c.tau.values}, {"C", c.tau.C}}},
          {"k", c.ks},
          {"probes", probes},
          {"randomProbes", {{"count", c.randomProbes}, {"radius", c.randomRadius}}},
          {"rho", {{"type", c.rho.type}, {"c0", c.rho.c0}, {"c", {c.rho.c(0), c.rho.c(1), c.rho.c(2)}}}},
          {"tolerances",
           {{"flow", c.flowTol},
            {"window", c.window},
            {"expectedSlope", c.expectedSlope},
            {"exact", c.exactTol},
            {"errorFloor", c.errorFloor}}},
          {"output", {{"csv", c.outCsv}, {"json", c.outJson}}},
          {"seed", c.seed}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open config " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ArgumentError("malformed config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

FitResult fit_slope(const std::vector<int>& ks, const std::vector<double>& errs, int drop) {
  if (ks.size() != errs.size()) throw ArgumentError("fit_slope: size mismatch");
  std::vector<double> x, y;
  for (std::size_t i = static_cast<std::size_t>(std::max(0, drop)); i < ks.size(); ++i) {
    x.push_back(std::log(static_cast<double>(ks[i])));
    y.push_back(std::log(errs[i]));
  }
  FitResult r;
  r.points = static_cast<int>(x.size());
  if (r.points < 2) throw ArgumentError("fit_slope: need at least two points after dropping");
  auto ols = [](const std::vector<double>& X, const std::vector<double>& Y, double& b, double& a, double& se) {
    const double n = static_cast<double>(X.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      mx += X[i] / n;
      my += Y[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      sxx += (X[i] - mx) * (X[i] - mx);
      sxy += (X[i] - mx) * (Y[i] - my);
    }
    b = sxy / sxx;
    a = my - b * mx;
    double rss = 0;
    for (std::size_t i = 0; i < X.size(); ++i) rss += std::pow(Y[i] - a - b * X[i], 2);
    se = X.size() > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  };
  double se;
  ols(x, y, r.slope, r.intercept, se);
  if (r.points > 2) {
    boost::math::students_t dist(r.points - 2);
    r.halfWidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  }
  const std::size_t h = x.size() / 2;
  if (x.size() - h >= 2) {
    std::vector<double> xt(x.begin() + h, x.end()), yt(y.begin() + h, y.end());
    double a2, se2;
    ols(xt, yt, r.topHalfSlope, a2, se2);
    r.stable = std::abs(r.topHalfSlope - r.slope) <= r.halfWidth;
  } else {
    r.topHalfSlope = r.slope;
  }
  return r;
}

ConvergenceReport run_kernel_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  const Hamiltonian ham = make_hamiltonian(cfg.hamiltonian, cfg.params);
  const std::vector<ProbeSpec> probes = all_probes(cfg);
  if (probes.empty()) throw ArgumentError("kernel-scaling needs at least one probe");
  const KahlerModel model = cp1_model();
  const Symbol rhoSlice = cfg.rho.slice();

  std::vector<LocalProbeGeometry> geo;
  for (const auto& p : probes) {
    geo.push_back(local_probe_geometry(ham, p.point, cfg.tau0, std::min(cfg.flowTol, 1e-11)));
    if (p.kind == "fixed-point" && !geo.back().rm.sameFiber)
      throw PreconditionError("probe '" + p.name + "' is not a fixed point of the flow at tau0");
    if (p.kind == "off-locus" && dist_M(geo.back().rm.x, geo.back().rm.xt) < 1e-3)
      throw PreconditionError("probe '" + p.name + "' lies on the fixed locus");
  }

  const std::size_t nk = cfg.ks.size();
  std::vector<std::vector<ReportRow>> rows(nk);
  parallel_for(nk, [&](std::size_t ik) {
    const int k = cfg.ks[ik];
    const double sk = std::sqrt(static_cast<double>(k));
    QuantumLevel L = level(model, k);
    std::map<double, OperatorMatrix> ops;
    auto op_at = [&](double t) -> const OperatorMatrix& {
      auto it = ops.find(t);
      if (it != ops.end()) return it->second;
      EvolutionOptions eo;
      eo.tol = cfg.flowTol;
      return ops.emplace(t, evolution(L, ham, t, cfg.rho.family(), eo)).first->second;
    };
    for (std::size_t ip = 0; ip < probes.size(); ++ip) {
      const ProbeSpec& p = probes[ip];
      const LocalProbeGeometry& g = geo[ip];
      ReportRow r;
      r.k = k;
      r.tau = p.tau;
      if (p.kind == "fixed-point" || p.kind == "generic") {
        const bool same = p.kind == "fixed-point";
        const OperatorMatrix& U = op_at(cfg.tau0 + p.tau / sk);
        C2 x = g.rm.source.mapC2(0.0, p.u / sk);
        C2 y = same ? g.rm.source.mapC2(0.0, p.w / sk) : g.rm.target.mapC2(0.0, p.w / sk);
        r.measured = kernel_eval(L, U, x, y);
        LocalKernelOptions lo;
        lo.window = cfg.window;
        lo.sameChart = same;
        const double rv = rhoSlice ? rhoSlice(c2_to_bloch(g.rm.x)).real() : 1.0;
        r.predicted = predict_local_kernel(g, p.tau, p.u, p.w, k, rv, lo).value;
        r.error = std::abs(r.measured / r.predicted - 1.0);
        r.phaseDiff = std::arg(r.measured / r.predicted);
      } else if (p.kind == "off-graph") {
        const OperatorMatrix& U = op_at(cfg.tau0);
        Vec v(2);
        v << std::tan(p.separation), 0.0;
        r.measured = kernel_eval(L, U, g.rm.x, g.rm.target.mapC2(0.0, v));
        r.error = std::abs(r.measured);
      } else {
        const OperatorMatrix& U = op_at(cfg.tau0);
        r.measured = kernel_eval(L, U, g.rm.x, g.rm.x);
        r.error = std::abs(r.measured);
      }
      rows[ik].push_back(r);
    }
  });

  ConvergenceReport rep;
  rep.experiment = "kernel-scaling";
  rep.config = cfg;
  rep.pass = true;
  for (std::size_t ip = 0; ip < probes.size(); ++ip) {
    SeriesReport s;
    s.label = probes[ip].name;
    s.kind = probes[ip].kind;
    for (std::size_t ik = 0; ik < nk; ++ik) s.rows.push_back(rows[ik][ip]);
    const bool decay = s.kind == "off-graph" || s.kind == "off-locus";
    finish_series(s, cfg.ks, decay ? 0.0 : cfg.errorFloor);
    s.expectedSlope = probes[ip].expectedSlope != 0.0 ? probes[ip].expectedSlope : default_slope(s.kind);
    s.pass = decay ? s.fit.slope < s.expectedSlope : s.fit.slope <= s.expectedSlope;
    rep.pass = rep.pass && s.pass;
    rep.series.push_back(std::move(s));
  }
  return rep;
}

ConvergenceReport run_trace_fixed(const ExperimentConfig& cfg) {
  cfg.validate();
  const Hamiltonian ham = make_hamiltonian(cfg.hamiltonian, cfg.params);
  const KahlerModel model = cp1_model();
  PeriodProfile prof = classify_period(ham, cfg.tau0);
  if (!prof.veryClean) throw PreconditionError("tau0 is not a very clean period");
  const Symbol rhoSlice = cfg.rho.slice();
  const std::size_t nk = cfg.ks.size();
  std::vector<ReportRow> rows(nk);
  parallel_for(nk, [&](std::size_t ik) {
    const int k = cfg.ks[ik];
    QuantumLevel L = level(model, k);
    ReportRow& r = rows[ik];
    r.k = k;
    r.tau = cfg.tau0;
    r.measured = measured_trace(L, ham, cfg.tau0, cfg);
    r.predicted = predict_trace_fixed(prof, ham, rhoSlice, k).value;
    r.error = std::abs(r.measured - r.predicted) / std::max(std::abs(r.predicted), cfg.errorFloor);
    r.phaseDiff = std::arg(r.measured / r.predicted);
    if (ham.generator && cfg.rho.trivial()) {
      cplx ex = exact_weight_trace(ham, k, cfg.tau0);
      r.exactError = std::abs(r.measured - ex) / std::max(std::abs(ex), cfg.errorFloor);
    }
  });
  ConvergenceReport rep;
  rep.experiment = "trace-fixed";
  rep.config = cfg;
  SeriesReport s;
  s.label = "trace";
  s.kind = "trace-fixed";
  s.rows = rows;
  finish_series(s, cfg.ks, cfg.errorFloor);
  s.expectedSlope = cfg.expectedSlope;
  if (cfg.exactTol > 0.0) {
    s.pass = true;
    for (auto& r : s.rows) s.pass = s.pass && r.error <= cfg.exactTol;
  } else {
    s.pass = s.fit.slope <= s.expectedSlope;
  }
  rep.pass = s.pass;
  rep.series.push_back(std::move(s));
  return rep;
}

ConvergenceReport run_trace_rescaled(const ExperimentConfig& cfg) {
  cfg.validate();
  const Hamiltonian ham = make_hamiltonian(cfg.hamiltonian, cfg.params);
  const KahlerModel model = cp1_model();
  PeriodProfile prof = classify_period(ham, cfg.tau0);
  if (!prof.morseBott) throw PreconditionError("tau0 is not a Morse-Bott period");
  const Symbol rhoSlice = cfg.rho.slice();
  const std::size_t nk = cfg.ks.size(), nt = cfg.tau.values.size();
  std::vector<std::vector<ReportRow>> rows(nk, std::vector<ReportRow>(nt));
  parallel_for(nk, [&](std::size_t ik) {
    const int k = cfg.ks[ik];
    const double kk = static_cast<double>(k), sk = std::sqrt(kk);
    QuantumLevel L = level(model, k);
    for (std::size_t it = 0; it < nt; ++it) {
      const double tau = cfg.tau.values[it];
      const double C = cfg.tau.C > 0.0 ? cfg.tau.C : std::abs(tau);
      ReportRow& r = rows[ik][it];
      r.k = k;
      r.tau = tau;
      r.measured = measured_trace(L, ham, cfg.tau0 + tau / sk, cfg);
      r.predicted = predict_trace_rescaled(prof, ham, rhoSlice, k, tau, C).value;
      r.error = std::abs(r.measured - r.predicted) / std::max(std::abs(r.predicted), cfg.errorFloor);
      r.phaseDiff = std::arg(r.measured / r.predicted);
      const double lo = C * std::pow(kk, -1.0 / 9.0), hi = C * std::pow(kk, 1.0 / 9.0);
      r.windowEdge = std::abs(tau) >= 0.9 * hi || std::abs(tau) <= lo / 0.9;
      if (ham.generator && cfg.rho.trivial() && cfg.tau0 == 0.0) {
        cplx ex = exact_weight_trace(ham, k, tau / sk);
        r.exactError = std::abs(r.measured - ex) / std::max(std::abs(ex), cfg.errorFloor);
      }
    }
  });
  ConvergenceReport rep;
  rep.experiment = "trace-rescaled";
  rep.config = cfg;
  rep.pass = true;
  for (std::size_t it = 0; it < nt; ++it) {
    SeriesReport s;
    std::ostringstream os;
    os << "tau=" << cfg.tau.values[it];
    s.label = os.str();
    s.kind = "trace-rescaled";
    for (std::size_t ik = 0; ik < nk; ++ik) s.rows.push_back(rows[ik][it]);
    finish_series(s, cfg.ks, cfg.errorFloor);
    s.expectedSlope = 0.0;
    s.pass = s.fit.slope < 0.0;
    rep.pass = rep.pass && s.pass;
    rep.series.push_back(std::move(s));
  }
  return rep;
}

std::string report_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "experiment,series,kind,k,tau,measured_re,measured_im,predicted_re,predicted_im,error,phase_diff,exact_error,"
        "window_edge\n";
  for (const auto& s : r.series)
    for (const auto& row : s.rows) {
      os << csv_field(r.experiment) << ',' << csv_field(s.label) << ',' << csv_field(s.kind) << ',' << row.k << ','
         << row.tau << ',' << row.measured.real() << ',' << row.measured.imag() << ',' << row.predicted.real() << ','
         << row.predicted.imag() << ',' << row.error << ',' << row.phaseDiff << ',';
      if (row.exactError >= 0.0) os << row.exactError;
      os << ',' << (row.windowEdge ? 1 : 0) << '\n';
    }
  return os.str();
}

json report_json(const ConvergenceReport& r) {
  json series = json::array();
  for (const auto& s : r.series) {
    json rows = json::array();
    for (const auto& row : s.rows) {
      json jr = {{"k", row.k},
                 {"tau", row.tau},
                 {"measured", cj(row.measured)},
                 {"predicted", cj(row.predicted)},
                 {"error", row.error},
                 {"phaseDiff", row.phaseDiff},
                 {"windowEdge", row.windowEdge}};
      if (row.exactError >= 0.0) jr["exactError"] = row.exactError;
      rows.push_back(jr);
    }
    series.push_back({{"label", s.label},
                      {"kind", s.kind},
                      {"rows", rows},
                      {"fit",
                       {{"slope", s.fit.slope},
                        {"intercept", s.fit.intercept},
                        {"halfWidth", s.fit.halfWidth},
                        {"points", s.fit.points},
                        {"topHalfSlope", s.fit.topHalfSlope},
                        {"stable", s.fit.stable}}},
                      {"expectedSlope", s.expectedSlope},
                      {"monotone", s.monotone},
                      {"pass", s.pass}});
  }
  return {{"experiment", r.experiment}, {"config", config_to_json(r.config)}, {"series", series}, {"pass", r.pass}};
}

void write_outputs(const ConvergenceReport& r) {
  if (!r.config.outCsv.empty()) {
    std::ofstream f(r.config.outCsv);
    if (!f) throw ArgumentError("cannot write " + r.config.outCsv);
    f << report_csv(r);
  }
  if (!r.config.outJson.empty()) {
    std::ofstream f(r.config.outJson);
    if (!f) throw ArgumentError("cannot write " + r.config.outJson);
    f << report_json(r).dump(2) << '\n';
  }
}

Mat random_symplectic(int d, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const int n = 2 * d;
  Mat A = Mat::Identity(n, n);
  for (int f = 0; f < 2; ++f) {
    Mat S(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) S(i, j) = nd(rng);
    S = (0.5 * scale * (S + S.transpose()) / std::sqrt(static_cast<double>(n))).eval();
    Mat H = J0(d) * S;
    A = A * H.exp();
  }
  return A;
}

}  // namespace btlab
