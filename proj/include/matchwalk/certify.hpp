#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "matchwalk/exact.hpp"
#include "matchwalk/flow.hpp"
#include "matchwalk/short_paths.hpp"

namespace matchwalk {

/// Per-transition flow against the encoding bounds.
struct EncodingReport {
  std::size_t catalog_size = 0;
  Rational bound_g, bound_b, bound_a, bound_total;  // 2|P|/|Ω|, 2|P|²|E|/|Ω|, |P|/|Ω|, (3|P| + 2|P|²|E|)/|Ω|
  Rational max_g, max_b, max_a, max_total;
  std::size_t worst_g = 0, worst_b = 0, worst_a = 0, worst_total = 0;

  bool class_bound = true;  // every η_g class holds ≤ 2 (j!)² paths through t
  bool eta_a_endpoints = true;
  bool paths_g = true, paths_b = true, paths_a = true, total = true;
  std::vector<std::string> violations;

  bool ok() const { return class_bound && eta_a_endpoints && paths_g && paths_b && paths_a && total; }
};

inline EncodingReport verify_encoding_bounds(const FlowSummary& flow, std::size_t catalog_size) {
  EncodingReport r;
  r.catalog_size = catalog_size;
  const BigInt P = catalog_size;
  const BigInt E = flow.m;
  const BigInt N = flow.omega_size;
  r.bound_g = Rational(2 * P, N);
  r.bound_b = Rational(2 * P * P * E, N);
  r.bound_a = Rational(P, N);
  r.bound_total = Rational(3 * P + 2 * P * P * E, N);

  auto track = [](const Rational& v, std::size_t t, Rational& best, std::size_t& where) {
    if (v > best) {
      best = v;
      where = t;
    }
  };
  for (std::size_t t = 0; t < flow.transitions.size(); ++t) {
    track(flow.flow_g[t], t, r.max_g, r.worst_g);
    track(flow.flow_b[t], t, r.max_b, r.worst_b);
    track(flow.flow_a[t], t, r.max_a, r.worst_a);
    track(flow.flow(t), t, r.max_total, r.worst_total);
  }
  auto check = [&](bool& flag, const char* name, const Rational& v, const Rational& bound, std::size_t t) {
    flag = v <= bound;
    if (!flag)
      r.violations.push_back(std::string(name) + " at transition " + std::to_string(t) + ": " + to_string(v) + " > " +
                             to_string(bound));
  };
  check(r.paths_g, "paths_g", r.max_g, r.bound_g, r.worst_g);
  check(r.paths_b, "paths_b", r.max_b, r.bound_b, r.worst_b);
  check(r.paths_a, "paths_a", r.max_a, r.bound_a, r.worst_a);
  check(r.total, "f(t)", r.max_total, r.bound_total, r.worst_total);
  r.class_bound = flow.eta_g_class_bound;
  if (!r.class_bound) r.violations.push_back("an η_g class exceeds 2(j!)² paths through one transition");
  r.eta_a_endpoints = flow.eta_a_endpoints;
  if (!r.eta_a_endpoints) r.violations.push_back("an η_a class mixes start states");
  return r;
}

inline EncodingReport verify_encoding_bounds(const Graph& g, std::size_t k, const Rational& delta,
                                             const FlowOptions& opt = {}) {
  return verify_encoding_bounds(build_flow(g, k, delta, opt), short_path_catalog(g, delta).size());
}

/// n² Δ^{4/δ − 2}, exact when the exponent is an integer.
struct DegreeFactor {
  Rational exact;  // valid when is_exact
  double approx = 0;
  bool is_exact = false;
};

inline DegreeFactor degree_factor(std::size_t n, std::size_t max_degree, const Rational& delta) {
  DegreeFactor f;
  const Rational exponent = Rational(4) / delta - 2;
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  f.approx = n2 * std::pow(static_cast<double>(max_degree), to_double(exponent));
  if (denominator(exponent) == 1 && exponent >= 0) {
    f.is_exact = true;
    BigInt p = pow(BigInt(max_degree), static_cast<unsigned>(numerator(exponent)));
    f.exact = Rational(BigInt(n) * n * p);
  }
  return f;
}

/// Compares a ≤ c · factor, exactly when the factor is exact.
inline bool within_degree_bound(const Rational& a, const Rational& c, const DegreeFactor& f) {
  if (f.is_exact) return a <= c * f.exact;
  return to_double(a) <= to_double(c) * f.approx * (1 + 1e-12);
}

struct FlowCertificate {
  FlowSummary flow;
  EncodingReport encoding;
  SpectralGap gap;
  bool ergodic = false;
  DegreeFactor degree;

  Rational ell_bound;          // 3|E|
  Rational rho_catalog_bound;  // 3k|E|²|P|²
  Rational rho_degree_coeff;   // 12k|E|², times n²Δ^{4/δ−2}
  Rational invgap_coeff;       // 36k|E|³, times n²Δ^{4/δ−2}
  Rational inverse_rho_ell;    // 1 / (ρ ℓ), 0 when ρ ℓ = 0

  bool conservation = false;  // exact demand, simple legal paths
  bool ell3E = false;
  bool rho_catalog = false;
  bool flowcost = false;
  bool thm22 = false;
  bool invgap = false;

  bool certified() const { return conservation && ell3E && rho_catalog && flowcost && thm22 && invgap; }
};

/// Builds the flow, computes α exactly and checks each bound independently.
inline FlowCertificate certify(const Graph& g, std::size_t k, const Rational& delta, const FlowOptions& opt = {}) {
  FlowCertificate c;
  TransitionMatrix t(StateSpace(g, k, opt.state_budget));
  c.flow = build_flow(t.space(), delta, opt);
  const std::size_t catalog = short_path_catalog(g, delta).size();
  c.encoding = verify_encoding_bounds(c.flow, catalog);
  c.ergodic = check_ergodicity(t).ergodic;
  c.gap = spectral_gap(t);

  const BigInt E = g.m();
  const BigInt K = k;
  const BigInt P = catalog;
  c.degree = degree_factor(g.n(), g.max_degree(), delta);
  c.ell_bound = Rational(3 * E);
  c.rho_catalog_bound = Rational(3 * K * E * E * P * P);
  c.rho_degree_coeff = Rational(12 * K * E * E);
  c.invgap_coeff = Rational(36 * K * E * E * E);

  const auto& f = c.flow;
  c.conservation = f.pair_demand_check && f.failures.empty() && f.invalid_paths == 0;
  c.ell3E = Rational(f.ell) <= c.ell_bound;
  c.rho_catalog = f.rho <= c.rho_catalog_bound;
  c.flowcost = within_degree_bound(f.rho, c.rho_degree_coeff, c.degree);

  const Rational rho_ell = f.rho * f.ell;
  c.inverse_rho_ell = rho_ell == 0 ? Rational(0) : Rational(1) / rho_ell;
  c.thm22 = c.gap.alpha + 1e-9 >= to_double(c.inverse_rho_ell);

  if (c.gap.alpha <= 0) {
    c.invgap = false;
  } else {
    const double bound = c.degree.is_exact ? to_double(c.invgap_coeff * c.degree.exact)
                                           : to_double(c.invgap_coeff) * c.degree.approx;
    c.invgap = 1.0 / c.gap.alpha <= bound;
  }
  return c;
}

}  // namespace matchwalk
