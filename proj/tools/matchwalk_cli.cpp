#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "matchwalk.hpp"
#include "report.hpp"

namespace mw = matchwalk;
using mw::report::Json;

namespace {

constexpr int kOk = 0;
constexpr int kCertificationFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string graph;
  std::size_t k = 1;
  std::string delta = "1/2";
  std::optional<std::uint64_t> seed;
  std::size_t budget = mw::kDefaultStateBudget;
  std::string epsilon = "1/4";
  bool compact = false;
  bool quiet = false;
};

std::uint64_t resolve_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("MATCHWALK_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("MATCHWALK_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

mw::Graph load_graph(const Common& c) {
  if (c.graph.empty()) throw UsageError("--graph is required");
  return mw::read_graph_file(c.graph);
}

mw::Rational parse_rational_flag(const std::string& name, const std::string& text) {
  try {
    return mw::parse_rational(text);
  } catch (const std::exception& e) {
    throw UsageError(name + ": " + e.what());
  }
}

class Run {
 public:
  Run(std::string command, const Common& c) : command_(std::move(command)), common_(c), start_(Clock::now()) {}

  Json& parameters() { return parameters_; }

  int emit(Json results, std::uint64_t seed, int code, const std::string& summary) {
    Json out;
    out["command"] = command_;
    out["version"] = MATCHWALK_VERSION;
    out["seed"] = seed;
    out["parameters"] = parameters_;
    out["results"] = std::move(results);
    out["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_).count();
    std::cout << (common_.compact ? out.dump() : out.dump(2)) << "\n";
    if (!common_.quiet) std::cerr << command_ << ": " << summary << "\n";
    return code;
  }

 private:
  using Clock = std::chrono::steady_clock;
  std::string command_;
  Common common_;
  Clock::time_point start_;
  Json parameters_ = Json::object();
};

void add_output_flags(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "RNG seed (falls back to MATCHWALK_SEED, then 0)");
  sub->add_flag("--json", c.compact, "Emit compact single-line JSON");
  sub->add_flag("--quiet", c.quiet, "Suppress the summary on stderr");
}

int cmd_sample(const Common& c, std::size_t samples, std::size_t burn_in, std::size_t stride) {
  auto g = load_graph(c);
  const auto seed = resolve_seed(c);
  Run run("sample", c);
  run.parameters() = {{"graph", c.graph}, {"k", c.k}, {"samples", samples}, {"burn_in", burn_in}, {"stride", stride}};
  auto dist = mw::empirical_distribution(g, c.k, samples, burn_in, stride, seed, c.budget);
  std::vector<double> uniform(dist.states.size(), 1.0 / static_cast<double>(dist.states.size()));
  Json records = Json::array();
  for (std::size_t i = 0; i < dist.states.size(); ++i)
    records.push_back({{"state", mw::report::edge_list(dist.states[i])}, {"count", dist.counts[i]}, {"frequency", dist.frequency[i]}});
  const double tv = mw::tv_distance(dist.frequency, uniform);
  Json results{{"omega_size", dist.states.size()}, {"tv_to_uniform", tv}, {"records", std::move(records)}};
  return run.emit(std::move(results), seed, kOk,
                  std::to_string(dist.states.size()) + " states, TV to uniform " + std::to_string(tv));
}

int cmd_exact(const Common& c, bool mixing) {
  auto g = load_graph(c);
  const auto eps = parse_rational_flag("--epsilon", c.epsilon);
  if (eps <= 0 || eps >= 1) throw UsageError("--epsilon must lie in (0, 1)");
  Run run(mixing ? "mixing-time" : "exact-gap", c);
  run.parameters() = {{"graph", c.graph}, {"k", c.k}, {"epsilon", mw::to_string(eps)}, {"budget", c.budget}};
  auto t = mw::build_transition_matrix(g, c.k, c.budget);
  auto erg = mw::check_ergodicity(t);
  auto gap = mw::spectral_gap(t);
  Json results = mw::report::spectral(t, gap, erg);
  const double e = mw::to_double(eps);
  if (erg.ergodic) {
    const auto tmix = mw::mixing_time(t, e);
    results["tmix"] = tmix;
    results["tmix_quarter"] = e == 0.25 ? tmix : mw::mixing_time(t, 0.25);
  } else {
    results["tmix"] = nullptr;
    results["tmix_quarter"] = nullptr;
    Json comps = Json::array();
    for (const auto& comp : erg.components) comps.push_back(comp);
    results["certificate"] = std::move(comps);
  }
  std::string summary = "|Ω| = " + std::to_string(t.size()) + ", alpha = " + std::to_string(gap.alpha) +
                        (erg.ergodic ? "" : ", not ergodic");
  // Mixing time is undefined on a disconnected chain.
  const int code = (mixing && !erg.ergodic) ? kCertificationFailed : kOk;
  return run.emit(std::move(results), 0, code, summary);
}

int cmd_certify(const Common& c, std::size_t path_budget) {
  auto g = load_graph(c);
  const auto delta = parse_rational_flag("--delta", c.delta);
  if (delta <= 0 || delta >= 1) throw UsageError("--delta must lie in (0, 1)");
  Run run("certify-flow", c);
  run.parameters() = {{"graph", c.graph}, {"k", c.k}, {"delta", mw::to_string(delta)}, {"budget", path_budget}};
  mw::FlowOptions opt;
  opt.path_budget = path_budget;
  opt.state_budget = c.budget;
  auto cert = mw::certify(g, c.k, delta, opt);
  Json results = mw::report::certificate(cert);
  return run.emit(std::move(results), 0, cert.certified() ? kOk : kCertificationFailed,
                  cert.certified() ? "certified" : "certification failed");
}

int cmd_influence(const Common& c, bool with_matrix) {
  auto g = load_graph(c);
  Run run("influence", c);
  run.parameters() = {{"graph", c.graph}, {"k", c.k}};
  auto M = mw::influence_matrix(g, c.k, c.budget);
  auto s = mw::influence_spectrum(M);
  Json results = mw::report::influence(M, s, with_matrix);
  return run.emit(std::move(results), 0, kOk,
                  "lambda_max = " + std::to_string(s.lambda_max) + ", linf = " + std::to_string(mw::linf_independence_constant(M)));
}

struct GadgetFlags {
  std::size_t n = 40;
  std::string delta = "1/10";
  std::string core = "c4";
  std::optional<std::size_t> pin_size;
  std::optional<double> lambda;
  std::size_t trials = 100;
  bool records = false;
};

int cmd_gadget(const Common& c, const GadgetFlags& f) {
  const auto delta = parse_rational_flag("--delta", f.delta);
  mw::CoreKind kind;
  if (f.core == "c4")
    kind = mw::CoreKind::kC4Union;
  else if (f.core == "cycle")
    kind = mw::CoreKind::kCycle;
  else
    throw UsageError("--core must be c4 or cycle");
  const auto seed = resolve_seed(c);
  Run run("gadget", c);
  auto gg = mw::build_gadget(f.n, delta, kind);

  std::size_t pin;
  if (f.pin_size && f.lambda) throw UsageError("give either --pin-size or --lambda");
  if (f.pin_size)
    pin = *f.pin_size;
  else if (f.lambda)
    pin = mw::pin_size_for_lambda(gg, *f.lambda);
  else
    pin = static_cast<std::size_t>(std::llround(static_cast<double>(f.n) / 2 - std::cbrt(static_cast<double>(f.n) * f.n)));
  if (pin > gg.M.size()) throw UsageError("--pin-size exceeds |M| = " + std::to_string(gg.M.size()));
  run.parameters() = {{"n", f.n}, {"delta", mw::to_string(delta)}, {"core", f.core}, {"pin_size", pin}, {"trials", f.trials}};

  const mw::CounterRng root(seed);
  Json trials = Json::array();
  double sum_ratio = 0, sum_x = 0, sum_x2 = 0;
  std::size_t degenerate = 0;
  for (std::size_t t = 0; t < f.trials; ++t) {
    const auto trial_seed = root.split(t)();
    auto tau = mw::random_pinning(gg, pin, trial_seed);
    auto s = mw::slack_statistics(gg, tau);
    const double ratio = mw::to_double(s.ratio);
    sum_ratio += ratio;
    sum_x += static_cast<double>(s.x_tau);
    sum_x2 += static_cast<double>(s.x_tau) * static_cast<double>(s.x_tau);
    degenerate += s.degenerate;
    if (f.records)
      trials.push_back({{"seed", trial_seed}, {"x_tau", s.x_tau}, {"m_star_residual", s.m_star_residual},
                        {"ratio", mw::to_string(s.ratio)}, {"degenerate", s.degenerate}});
  }
  const double nt = static_cast<double>(std::max<std::size_t>(f.trials, 1));
  const double mean_x = sum_x / nt;
  const double sd_x = f.trials > 1 ? std::sqrt(std::max(0.0, (sum_x2 - nt * mean_x * mean_x) / (nt - 1))) : 0;
  Json results;
  results["graph"] = {{"n", gg.n}, {"m", gg.graph.m()}, {"p9_blocks", gg.p9_blocks.size()},
                      {"matching_size", gg.M.size()}, {"lambda", 1 - static_cast<double>(pin) / static_cast<double>(gg.M.size())}};
  results["slack"] = {{"identity", "holds"},
                      {"mean_ratio", sum_ratio / nt},
                      {"mean_x", mean_x},
                      {"sd_x", sd_x},
                      {"expected_x", mw::to_string(mw::expected_avoidance(gg, pin))},
                      {"degenerate_trials", degenerate}};
  std::string summary = "mean X = " + std::to_string(mean_x);
  if (kind == mw::CoreKind::kC4Union) {
    auto rep = mw::ergodicity_experiment(gg, pin, f.trials, seed ^ 0x5bd1e995ULL);
    results["ergodicity"] = {{"fired", rep.fired},
                             {"frequency", rep.frequency},
                             {"interval", {rep.interval.lo, rep.interval.hi}},
                             {"exact_checked", rep.exact_checked},
                             {"disagreements", rep.disagreements}};
    if (f.records) {
      for (std::size_t t = 0; t < rep.trials.size(); ++t) {
        const auto& tr = rep.trials[t];
        trials[t]["certificate"] = tr.certificate;
        trials[t]["hits_every_p9"] = tr.hits_every_p9;
        trials[t]["exact_checked"] = tr.exact_checked;
        if (tr.exact_checked) trials[t]["exact_ergodic"] = tr.exact_ergodic;
      }
    }
    summary += ", non-ergodic certificate in " + std::to_string(rep.fired) + "/" + std::to_string(f.trials) + " trials";
  }
  if (f.records) results["trials"] = std::move(trials);
  return run.emit(std::move(results), seed, kOk, summary);
}

}  // namespace

#include "corpus_command.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Down-up walk on size-k matchings: sampling, exact analysis and flow certificates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(MATCHWALK_VERSION));

  Common c;
  auto graph_flags = [&](CLI::App* sub, bool need_k = true) {
    sub->add_option("--graph", c.graph, "Edge-list file")->required();
    if (need_k) sub->add_option("--k", c.k, "Matching size")->required();
    sub->add_option("--budget", c.budget, "Maximum number of states to enumerate");
    add_output_flags(sub, c);
  };

  std::size_t samples = 10000, burn_in = 1000, stride = 1;
  auto* sample = app.add_subcommand("sample", "Run the walk and report empirical state frequencies");
  graph_flags(sample);
  sample->add_option("--samples", samples, "Retained samples");
  sample->add_option("--burn-in", burn_in, "Steps discarded before sampling");
  sample->add_option("--stride", stride, "Steps between retained samples")->check(CLI::PositiveNumber);

  auto* gap = app.add_subcommand("exact-gap", "Exact spectral gap of the transition matrix");
  graph_flags(gap);
  gap->add_option("--epsilon", c.epsilon, "Mixing threshold");
  auto* mix = app.add_subcommand("mixing-time", "Exact mixing time");
  graph_flags(mix);
  mix->add_option("--epsilon", c.epsilon, "Mixing threshold");

  std::size_t path_budget = 10'000'000;
  auto* cert = app.add_subcommand("certify-flow", "Build the canonical flow and check its bounds");
  cert->add_option("--graph", c.graph, "Edge-list file")->required();
  cert->add_option("--k", c.k, "Matching size")->required();
  cert->add_option("--delta", c.delta, "Slack parameter in (0, 1), e.g. 1/3 or 0.25")->required();
  cert->add_option("--budget", path_budget, "Maximum number of canonical paths");
  cert->add_option("--state-budget", c.budget, "Maximum number of states to enumerate");
  add_output_flags(cert, c);

  bool with_matrix = false;
  auto* infl = app.add_subcommand("influence", "Signed pairwise influence matrix");
  graph_flags(infl);
  infl->add_flag("--matrix", with_matrix, "Include the exact matrix");

  GadgetFlags gf;
  auto* gad = app.add_subcommand("gadget", "Random pinnings of the barrier gadget");
  gad->add_option("--n", gf.n, "Number of vertices");
  gad->add_option("--delta", gf.delta, "Slack parameter in (0, 1/5)");
  gad->add_option("--core", gf.core, "Core graph: c4 or cycle");
  gad->add_option("--pin-size", gf.pin_size, "Pinned edges (default round(n/2 - n^(2/3)))");
  gad->add_option("--lambda", gf.lambda, "Unpinned fraction of M, instead of --pin-size");
  gad->add_option("--trials", gf.trials, "Number of random pinnings");
  gad->add_flag("--records", gf.records, "Include per-trial records");
  add_output_flags(gad, c);

  CorpusFlags cf;
  auto* corp = app.add_subcommand("corpus", "Batch run over a JSON config or the built-in corpus");
  corp->add_option("--config", cf.config, "JSON config file");
  corp->add_flag("--builtin", cf.builtin, "Use the built-in corpus");
  corp->add_option("--budget", path_budget, "Maximum number of canonical paths per instance");
  corp->add_option("--state-budget", c.budget, "Maximum number of states to enumerate");
  add_output_flags(corp, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sample) return cmd_sample(c, samples, burn_in, stride);
    if (*gap) return cmd_exact(c, false);
    if (*mix) return cmd_exact(c, true);
    if (*cert) return cmd_certify(c, path_budget);
    if (*infl) return cmd_influence(c, with_matrix);
    if (*gad) return cmd_gadget(c, gf);
    if (*corp) return cmd_corpus(c, cf, path_budget);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const mw::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const mw::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const mw::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCertificationFailed;
  }
  return kUsage;
}
