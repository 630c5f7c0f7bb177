#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "matchwalk/error.hpp"
#include "matchwalk/rational.hpp"
#include "matchwalk/state_space.hpp"

namespace matchwalk {

/// Exact down-up transition matrix over Ω = M_k(G). Every off-diagonal entry
/// is 1/(k·m) on a legal exchange and 0 elsewhere; the diagonal absorbs the
/// rejected proposals. Stationary distribution is uniform.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(StateSpace space) : space_(std::move(space)) {
    if (space_.k() == 0) throw PreconditionError("down-up walk needs k >= 1");
    denominator_ = space_.k() * space_.graph().m();
  }

  const StateSpace& space() const { return space_; }
  std::size_t size() const { return space_.size(); }
  /// Common denominator k·m of every entry.
  std::size_t denominator() const { return denominator_; }

  Rational entry(std::size_t x, std::size_t y) const {
    if (x == y) return Rational(static_cast<long long>(denominator_ - space_.degree(x)), static_cast<long long>(denominator_));
    auto row = space_.neighbors(x);
    bool adjacent = std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(y));
    return adjacent ? Rational(1, static_cast<long long>(denominator_)) : Rational(0);
  }
  Rational stay(std::size_t x) const { return entry(x, x); }
  Rational pi() const { return Rational(1, static_cast<long long>(size())); }

  Eigen::MatrixXd dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    const double w = 1.0 / static_cast<double>(denominator_);
    for (std::size_t x = 0; x < size(); ++x) {
      for (auto y : space_.neighbors(x)) p(static_cast<Eigen::Index>(x), y) = w;
      p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) =
          static_cast<double>(denominator_ - space_.degree(x)) / static_cast<double>(denominator_);
    }
    return p;
  }

 private:
  StateSpace space_;
  std::size_t denominator_ = 0;
};

inline TransitionMatrix build_transition_matrix(const Graph& g, std::size_t k,
                                                std::size_t budget = kDefaultStateBudget) {
  return TransitionMatrix(StateSpace(g, k, budget));
}

/// (1/2) Σ_{x,y} π(x) P(x,y) (f(x) − f(y)) (g(x) − g(y)).
inline double dirichlet_form(const TransitionMatrix& t, std::span<const double> f, std::span<const double> g) {
  if (f.size() != t.size() || g.size() != t.size())
    throw PreconditionError("dirichlet_form: vector length differs from |Ω|");
  const double weight = 1.0 / (static_cast<double>(t.size()) * static_cast<double>(t.denominator()));
  double sum = 0;
  for (std::size_t x = 0; x < t.size(); ++x)
    for (auto y : t.space().neighbors(x)) sum += (f[x] - f[y]) * (g[x] - g[y]);
  return 0.5 * weight * sum;
}

inline double variance_uniform(std::span<const double> f) {
  double mean = 0;
  for (double v : f) mean += v;
  mean /= static_cast<double>(f.size());
  double var = 0;
  for (double v : f) var += (v - mean) * (v - mean);
  return var / static_cast<double>(f.size());
}

struct SpectralGap {
  double alpha = 1;       // 1 − λ₂
  double lambda2 = 0;
  double lambda_min = 0;
  double residual = 0;    // ‖P v₂ − λ₂ v₂‖∞
  bool single_state = false;
  Eigen::VectorXd second_eigenvector;
};

/// Spectral gap 1 − λ₂ of the symmetric matrix P. For |Ω| = 1 the gap is 1
/// by convention and `single_state` is set.
inline SpectralGap spectral_gap(const TransitionMatrix& t) {
  SpectralGap out;
  if (t.size() == 1) {
    out.single_state = true;
    out.lambda2 = 0;
    out.lambda_min = 1;
    out.second_eigenvector = Eigen::VectorXd::Ones(1);
    return out;
  }
  Eigen::MatrixXd p = t.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p);
  if (solver.info() != Eigen::Success) throw CertifierFailure("symmetric eigensolver did not converge");
  const auto& ev = solver.eigenvalues();  // ascending
  const auto n = ev.size();
  out.lambda2 = ev(n - 2);
  out.lambda_min = ev(0);
  out.alpha = 1.0 - out.lambda2;
  out.second_eigenvector = solver.eigenvectors().col(n - 2);
  out.residual = (p * out.second_eigenvector - out.lambda2 * out.second_eigenvector).cwiseAbs().maxCoeff();
  return out;
}

struct Ergodicity {
  bool ergodic = true;
  std::vector<std::vector<std::uint32_t>> components;  // sorted, ordered by first state
};

/// Connectivity of (Ω, E(P)). Aperiodicity is automatic: P(x,x) ≥ 1/m > 0.
inline Ergodicity check_ergodicity(const StateSpace& space) {
  Ergodicity out;
  std::vector<char> seen(space.size(), 0);
  for (std::uint32_t s = 0; s < space.size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::uint32_t> comp{s};
    seen[s] = 1;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (auto y : space.neighbors(comp[i]))
        if (!seen[y]) {
          seen[y] = 1;
          comp.push_back(y);
        }
    std::sort(comp.begin(), comp.end());
    out.components.push_back(std::move(comp));
  }
  out.ergodic = out.components.size() <= 1;
  return out;
}

inline Ergodicity check_ergodicity(const TransitionMatrix& t) { return check_ergodicity(t.space()); }

class NonErgodicError : public Error {
 public:
  explicit NonErgodicError(Ergodicity certificate)
      : Error("chain is not ergodic: " + std::to_string(certificate.components.size()) + " components"),
        certificate_(std::move(certificate)) {}
  const Ergodicity& certificate() const { return certificate_; }

 private:
  Ergodicity certificate_;
};

inline double tv_distance(std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != nu.size()) throw PreconditionError("tv_distance: dimension mismatch");
  double s = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
  return 0.5 * s;
}

namespace detail {

/// max_x TV(A(x,·), uniform) for a row-stochastic A.
inline double worst_tv_to_uniform(const Eigen::MatrixXd& a) {
  const double u = 1.0 / static_cast<double>(a.cols());
  return 0.5 * (a.array() - u).abs().rowwise().sum().maxCoeff();
}

}  // namespace detail

/// Smallest t with max_x TV(P^t(x,·), π) < epsilon. d(t) is non-increasing,
/// so repeated squaring brackets t and a binary search over products of the
/// stored powers pins it down.
inline std::size_t mixing_time(const TransitionMatrix& t, double epsilon) {
  if (!(epsilon > 0 && epsilon < 1)) throw PreconditionError("epsilon must lie in (0, 1)");
  auto erg = check_ergodicity(t);
  if (!erg.ergodic) throw NonErgodicError(std::move(erg));
  if (1.0 - 1.0 / static_cast<double>(t.size()) < epsilon) return 0;

  std::vector<Eigen::MatrixXd> powers{t.dense()};  // powers[i] = P^(2^i)
  while (detail::worst_tv_to_uniform(powers.back()) >= epsilon) {
    if (powers.size() > 62) throw CertifierFailure("mixing time overflow");
    Eigen::MatrixXd sq = powers.back() * powers.back();
    powers.push_back(std::move(sq));
  }
  if (powers.size() == 1) return 1;

  // d(2^(s-1)) >= eps > d(2^s): find the answer in (2^(s-1), 2^s].
  std::size_t s = powers.size() - 1;
  std::size_t lo = std::size_t{1} << (s - 1);  // d(lo) >= eps
  std::size_t hi = std::size_t{1} << s;        // d(hi) < eps
  auto power = [&](std::size_t e) {
    Eigen::MatrixXd acc;
    bool first = true;
    for (std::size_t i = 0; e; ++i, e >>= 1)
      if (e & 1) {
        acc = first ? powers[i] : Eigen::MatrixXd(acc * powers[i]);
        first = false;
      }
    return acc;
  };
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (detail::worst_tv_to_uniform(power(mid)) < epsilon)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace matchwalk
