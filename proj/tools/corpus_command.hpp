// `corpus` subcommand: batch certify / influence / mixing over many graphs.
#pragma once

struct CorpusFlags {
  std::string config;
  bool builtin = false;
};

namespace {

struct CorpusMember {
  std::string name;
  mw::Graph graph;
  std::optional<std::vector<std::size_t>> ks;  // empty optional: all admissible sizes per delta
  std::vector<mw::Rational> deltas;
};

mw::Graph graph_from_spec(const Json& spec, std::string& name) {
  if (!spec.is_object() || !spec.contains("kind")) throw UsageError("corpus: each graph needs a \"kind\"");
  const std::string kind = spec.at("kind").get<std::string>();
  auto num = [&](const char* key) {
    if (!spec.contains(key)) throw UsageError("corpus: graph kind " + kind + " needs \"" + key + "\"");
    return spec.at(key).get<std::size_t>();
  };
  const std::uint64_t seed = spec.value("seed", std::uint64_t{0});
  if (kind == "path") {
    name = "path" + std::to_string(num("n"));
    return mw::generators::path(num("n"));
  }
  if (kind == "cycle") {
    name = "cycle" + std::to_string(num("n"));
    return mw::generators::cycle(num("n"));
  }
  if (kind == "complete") {
    name = "complete" + std::to_string(num("n"));
    return mw::generators::complete(num("n"));
  }
  if (kind == "disjoint-edges") {
    name = "disjoint" + std::to_string(num("count"));
    return mw::generators::disjoint_edges(num("count"));
  }
  if (kind == "random-regular") {
    name = "regular" + std::to_string(num("n")) + "-" + std::to_string(num("d")) + "-s" + std::to_string(seed);
    return mw::generators::random_regular(num("n"), num("d"), seed);
  }
  if (kind == "random-gnp") {
    name = "gnp" + std::to_string(num("n")) + "-s" + std::to_string(seed);
    return mw::generators::random_gnp(num("n"), spec.value("p", 0.5), seed);
  }
  if (kind == "gadget") {
    const auto delta = parse_rational_flag("gadget delta", spec.value("delta", std::string("1/10")));
    const std::string core = spec.value("core", std::string("c4"));
    name = "gadget" + std::to_string(num("n"));
    return mw::build_gadget(num("n"), delta, core == "cycle" ? mw::CoreKind::kCycle : mw::CoreKind::kC4Union).graph;
  }
  if (kind == "file") {
    name = spec.at("path").get<std::string>();
    return mw::read_graph_file(name);
  }
  throw UsageError("corpus: unknown graph kind \"" + kind + "\"");
}

std::vector<CorpusMember> load_corpus(const CorpusFlags& f) {
  std::vector<CorpusMember> out;
  if (f.builtin) {
    for (auto& g : mw::builtin_corpus()) out.push_back({g.name, std::move(g.graph), std::nullopt, mw::builtin_deltas()});
    return out;
  }
  if (f.config.empty()) throw UsageError("corpus: give --config FILE or --builtin");
  std::ifstream in(f.config);
  if (!in) throw UsageError("corpus: cannot open " + f.config);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("corpus: invalid JSON: ") + e.what());
  }
  if (!cfg.contains("members")) return out;
  for (const auto& m : cfg.at("members")) {
    CorpusMember member;
    member.graph = graph_from_spec(m.at("graph"), member.name);
    if (m.contains("name")) member.name = m.at("name").get<std::string>();
    if (m.contains("k") && m.at("k").is_array()) member.ks = m.at("k").get<std::vector<std::size_t>>();
    if (m.contains("delta")) {
      for (const auto& d : m.at("delta"))
        member.deltas.push_back(parse_rational_flag("delta", d.is_string() ? d.get<std::string>() : d.dump()));
    } else {
      member.deltas = mw::builtin_deltas();
    }
    out.push_back(std::move(member));
  }
  return out;
}

Json run_instance(const mw::Graph& g, std::size_t k, const mw::Rational& delta, std::size_t m_star,
                  const mw::FlowOptions& opt, std::string& status) {
  Json j{{"k", k}, {"delta", mw::to_string(delta)}};
  mw::TransitionMatrix t(mw::StateSpace(g, k, opt.state_budget));
  auto erg = mw::check_ergodicity(t);
  auto gap = mw::spectral_gap(t);
  j["exact"] = mw::report::spectral(t, gap, erg);
  if (erg.ergodic) j["exact"]["tmix_quarter"] = mw::mixing_time(t, 0.25);

  auto M = mw::influence_matrix(g, k, opt.state_budget);
  auto s = mw::influence_spectrum(M);
  j["influence"] = mw::report::influence(M, s, false);

  if (!erg.ergodic) {
    j["certificate"] = {{"skipped", "chain is not ergodic"}};
    status = "skipped";
    return j;
  }
  if (mw::Rational(k) > (1 - delta) * mw::BigInt(m_star)) {
    j["certificate"] = {{"skipped", "k exceeds (1 - delta) m*(G)"}};
    status = "skipped";
    return j;
  }
  auto cert = mw::certify(g, k, delta, opt);
  j["certificate"] = mw::report::certificate(cert);
  status = cert.certified() ? "pass" : "fail";
  return j;
}

int cmd_corpus(const Common& c, const CorpusFlags& f, std::size_t path_budget) {
  auto members = load_corpus(f);
  Run run("corpus", c);
  run.parameters() = {{"config", f.builtin ? std::string("builtin") : f.config}, {"budget", path_budget}};
  mw::FlowOptions opt;
  opt.path_budget = path_budget;
  opt.state_budget = c.budget;

  std::size_t passed = 0, failed = 0, skipped = 0, errors = 0;
  Json out = Json::array();
  for (const auto& m : members) {
    const std::size_t m_star = mw::matching_number(m.graph);
    Json entry{{"name", m.name}, {"n", m.graph.n()}, {"m", m.graph.m()}, {"matching_number", m_star}};
    Json instances = Json::array();
    for (const auto& delta : m.deltas) {
      auto ks = m.ks ? *m.ks : mw::admissible_sizes(m_star, delta);
      for (std::size_t k : ks) {
        std::string status;
        Json inst;
        try {
          inst = run_instance(m.graph, k, delta, m_star, opt, status);
        } catch (const mw::BudgetExceeded& e) {
          inst = {{"k", k}, {"delta", mw::to_string(delta)}, {"skipped", e.what()}};
          status = "skipped";
        } catch (const std::exception& e) {
          inst = {{"k", k}, {"delta", mw::to_string(delta)}, {"error", e.what()}};
          status = "error";
        }
        inst["status"] = status;
        passed += status == "pass";
        failed += status == "fail";
        skipped += status == "skipped";
        errors += status == "error";
        instances.push_back(std::move(inst));
      }
    }
    entry["instances"] = std::move(instances);
    out.push_back(std::move(entry));
  }
  Json results{{"members", std::move(out)},
               {"summary", {{"pass", passed}, {"fail", failed}, {"skipped", skipped}, {"error", errors}}}};
  const int code = (failed + errors) ? kCertificationFailed : kOk;
  return run.emit(std::move(results), resolve_seed(c), code,
                  std::to_string(passed) + " pass, " + std::to_string(failed) + " fail, " + std::to_string(skipped) +
                      " skipped, " + std::to_string(errors) + " error");
}

}  // namespace
