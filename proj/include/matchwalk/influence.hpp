#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "matchwalk/error.hpp"
#include "matchwalk/rational.hpp"
#include "matchwalk/state_space.hpp"

namespace matchwalk {

/// Signed pairwise influence matrix of the uniform distribution on size-k
/// matchings, over the ground set E(G).
struct InfluenceMatrix {
  std::size_t ground_set_size = 0;
  std::size_t omega_size = 0;
  std::vector<Rational> marginals;            // P[i]
  std::vector<std::vector<Rational>> exact;   // M(i, j) = P[j | i] - P[j | ī]
  Eigen::MatrixXd entries;
  std::vector<EdgeId> degenerate_rows;        // marginal 0 or 1, row zeroed
  bool total_probability = true;              // P[j] = P[i] P[j|i] + P[ī] P[j|ī] for all rows

  bool degenerate(EdgeId i) const {
    return std::binary_search(degenerate_rows.begin(), degenerate_rows.end(), i);
  }
};

inline InfluenceMatrix influence_matrix(const Graph& g, std::size_t k, std::size_t budget = kDefaultStateBudget) {
  const auto omega = enumerate_matchings(g, k, budget);
  if (omega.empty()) throw PreconditionError("influence_matrix: no matching of size " + std::to_string(k));
  const std::size_t m = g.m();
  const std::size_t N = omega.size();

  // both[i][j] = #{M ∈ Ω : i, j ∈ M}; the diagonal holds single counts.
  std::vector<std::vector<std::uint64_t>> both(m, std::vector<std::uint64_t>(m, 0));
  for (const auto& M : omega)
    for (EdgeId i : M)
      for (EdgeId j : M) ++both[i][j];

  InfluenceMatrix r;
  r.ground_set_size = m;
  r.omega_size = N;
  r.marginals.resize(m);
  r.exact.assign(m, std::vector<Rational>(m, Rational(0)));
  r.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const BigInt total = N;
  for (std::size_t i = 0; i < m; ++i) r.marginals[i] = Rational(BigInt(both[i][i]), total);

  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t ci = both[i][i];
    if (ci == 0 || ci == N) {
      r.degenerate_rows.push_back(static_cast<EdgeId>(i));
      continue;
    }
    const Rational pi = r.marginals[i];
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const Rational given = Rational(BigInt(both[i][j]), BigInt(ci));
      const Rational given_not = Rational(BigInt(both[j][j] - both[i][j]), BigInt(N - ci));
      if (pi * given + (1 - pi) * given_not != r.marginals[j]) r.total_probability = false;
      r.exact[i][j] = given - given_not;
      r.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(r.exact[i][j]);
    }
  }
  return r;
}

struct InfluenceSpectrum {
  double lambda_max = 0;  // largest real part
  std::vector<std::complex<double>> eigenvalues;
  double residual = 0;  // ||M v - λ v|| for the reported eigenpair, v of unit norm
};

inline InfluenceSpectrum influence_spectrum(const InfluenceMatrix& M) {
  InfluenceSpectrum s;
  if (M.ground_set_size == 0) return s;
  Eigen::EigenSolver<Eigen::MatrixXd> es(M.entries, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) throw Error("influence_spectrum: eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    s.eigenvalues.push_back(ev[i]);
    if (ev[i].real() > ev[best].real()) best = i;
  }
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(),
            [](auto a, auto b) { return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag(); });
  s.lambda_max = ev[best].real();
  Eigen::VectorXcd v = es.eigenvectors().col(best);
  v.normalize();
  s.residual = (M.entries.cast<std::complex<double>>() * v - ev[best] * v).norm();
  return s;
}

inline double spectral_independence_constant(const InfluenceMatrix& M) { return influence_spectrum(M).lambda_max; }

/// Maximum absolute row sum, exact.
inline Rational linf_independence_exact(const InfluenceMatrix& M) {
  Rational best = 0;
  for (const auto& row : M.exact) {
    Rational sum = 0;
    for (const auto& x : row) sum += abs(x);
    best = std::max(best, sum);
  }
  return best;
}

inline double linf_independence_constant(const InfluenceMatrix& M) { return to_double(linf_independence_exact(M)); }

}  // namespace matchwalk
