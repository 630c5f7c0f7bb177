// JSON encoders for the command-line front end.
#pragma once

#include <json.hpp>

#include "matchwalk.hpp"

namespace matchwalk::report {

using Json = nlohmann::ordered_json;

inline Json edge_list(const Matching& m) { return Json(m.edge_ids()); }

inline Json rational(const Rational& q) { return to_string(q); }

inline Json spectral(const TransitionMatrix& t, const SpectralGap& gap, const Ergodicity& erg) {
  const auto& g = t.space().graph();
  Json j;
  j["n"] = g.n();
  j["m"] = g.m();
  j["k"] = t.space().k();
  j["omega_size"] = t.size();
  j["ergodic"] = erg.ergodic;
  j["components"] = erg.components.size();
  j["alpha"] = gap.alpha;
  j["lambda2"] = gap.lambda2;
  j["lambda_min"] = gap.lambda_min;
  j["residual"] = gap.residual;
  j["single_state"] = gap.single_state;
  return j;
}

inline Json certificate(const FlowCertificate& c) {
  const auto& f = c.flow;
  Json j;
  j["n"] = f.n;
  j["m"] = f.m;
  j["k"] = f.k;
  j["delta"] = rational(f.delta);
  j["omega_size"] = f.omega_size;
  j["rho"] = rational(f.rho);
  j["rho_approx"] = to_double(f.rho);
  j["ell"] = f.ell;
  j["alpha"] = c.gap.alpha;
  j["ergodic"] = c.ergodic;
  j["inverse_rho_ell"] = rational(c.inverse_rho_ell);
  auto pass = [](bool b) { return b ? "pass" : "fail"; };
  j["bounds"] = {
      {"conservation", pass(c.conservation)},
      {"ell3E", pass(c.ell3E)},
      {"rho_catalog", pass(c.rho_catalog)},
      {"flowcost", pass(c.flowcost)},
      {"thm22", pass(c.thm22)},
      {"invgap", pass(c.invgap)},
      {"encoding", pass(c.encoding.ok())},
  };
  j["certified"] = c.certified();
  if (f.worst_transition != StateSpace::kNoTransition) {
    auto [from, to] = f.transitions[f.worst_transition];
    j["worst_transition"] = {{"from", from}, {"to", to}, {"flow", rational(f.flow(f.worst_transition))}};
  } else {
    j["worst_transition"] = nullptr;
  }
  j["pairs"] = {{"good", f.good_pairs}, {"bad", f.bad_pairs}, {"rerouted", f.rerouted_bad_pairs}};
  j["paths"] = f.path_count;
  j["max_j"] = f.max_j;
  j["encoding"] = {
      {"catalog_size", c.encoding.catalog_size},
      {"max_paths_g", rational(c.encoding.max_g)},
      {"bound_paths_g", rational(c.encoding.bound_g)},
      {"max_paths_b", rational(c.encoding.max_b)},
      {"bound_paths_b", rational(c.encoding.bound_b)},
      {"max_paths_a", rational(c.encoding.max_a)},
      {"bound_paths_a", rational(c.encoding.bound_a)},
      {"max_flow", rational(c.encoding.max_total)},
      {"bound_flow", rational(c.encoding.bound_total)},
      {"eta_g_classes", f.eta_g_classes},
      {"eta_g_max_class_ratio", rational(f.eta_g_max_class_ratio)},
      {"eta_g_matching", f.eta_g_matching},
      {"eta_g_matching_exceptions", f.eta_g_matching_exceptions},
      {"eta_a_classes", f.eta_a_classes},
      {"violations", c.encoding.violations},
  };
  j["failures"] = f.failures;
  j["diagnostics"] = f.diagnostics;
  return j;
}

inline Json influence(const InfluenceMatrix& M, const InfluenceSpectrum& s, bool with_matrix) {
  Json j;
  j["ground_set_size"] = M.ground_set_size;
  j["omega_size"] = M.omega_size;
  j["lambda_max"] = s.lambda_max;
  j["eigen_residual"] = s.residual;
  j["linf"] = rational(linf_independence_exact(M));
  j["linf_approx"] = linf_independence_constant(M);
  j["degenerate_rows"] = M.degenerate_rows;
  j["total_probability"] = M.total_probability;
  if (with_matrix) {
    Json rows = Json::array();
    for (const auto& row : M.exact) {
      Json r = Json::array();
      for (const auto& x : row) r.push_back(rational(x));
      rows.push_back(std::move(r));
    }
    j["matrix"] = std::move(rows);
  }
  return j;
}

}  // namespace matchwalk::report
