#pragma once

// Test-only helpers. Oracles here deliberately avoid the library's own
// algorithms (no pareto_indices, no run_session shortcuts).

#include <cmath>
#include <random>
#include <vector>

#include "nego/domain.hpp"
#include "nego/gp.hpp"

namespace nego::testing {

/// Single-issue tabular domain with the given utility vectors.
inline NegotiationDomain vector_domain(const std::vector<std::pair<double, double>>& vecs,
                                       std::array<double, 2> reservation = {0.0, 0.0}) {
  Issue is{"x", {}, false};
  std::vector<double> a, b;
  for (std::size_t k = 0; k < vecs.size(); ++k) {
    is.options.push_back("o" + std::to_string(k));
    a.push_back(vecs[k].first);
    b.push_back(vecs[k].second);
  }
  return NegotiationDomain(OfferSpace({is}), {TabularUtility{a}, TabularUtility{b}}, reservation);
}

/// O(n^2) pairwise domination filter.
inline std::vector<std::size_t> brute_force_pareto(const NegotiationDomain& d) {
  const auto& a = d.table(1);
  const auto& b = d.table(2);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < d.size() && !dominated; ++j)
      dominated = a[j] >= a[i] && b[j] >= b[i] && (a[j] > a[i] || b[j] > b[i]);
    if (!dominated) out.push_back(i);
  }
  return out;
}

/// Random tabular domain on a coarse grid, so ties are common.
inline NegotiationDomain random_grid_domain(std::size_t n, std::uint64_t seed, int levels = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> L(0, levels - 1);
  std::vector<std::pair<double, double>> v;
  for (std::size_t k = 0; k < n; ++k)
    v.emplace_back(static_cast<double>(L(rng)) / (levels - 1), static_cast<double>(L(rng)) / (levels - 1));
  return vector_domain(v);
}

using Mat = std::vector<std::vector<double>>;

inline double matern(double a, double b, double ell, double var) {
  const double r = std::sqrt(3.0) * std::fabs(a - b) / ell;
  return var * (1.0 + r) * std::exp(-r);
}

// inverse by Gauss-Jordan with partial pivoting
inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(inv[c], inv[p]);
    const double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

// conditional of a joint Gaussian: the query block given the observed block
inline std::pair<double, double> condition(const std::vector<GpObservation>& obs, double t, double ell, double var,
                                           double noise) {
  const std::size_t n = obs.size();
  double m = 0.0;
  for (const auto& o : obs) m += o.z;
  m /= static_cast<double>(n);
  Mat K(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) K[i][j] = matern(obs[i].t, obs[j].t, ell, var) + (i == j ? noise : 0.0);
  const auto Ki = inverse(K);
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = matern(obs[i].t, t, ell, var);
  double mean = m, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      mean += k[i] * Ki[i][j] * (obs[j].z - m);
      quad += k[i] * Ki[i][j] * k[j];
    }
  return {mean, std::sqrt(std::max(0.0, matern(t, t, ell, var) - quad))};
}

// upper Gaussian tail by Simpson's rule
inline double tail(double mean, double sd, double z) {
  const double hi = mean + 14.0 * sd;
  if (z >= hi) return 0.0;
  const int n = 20000;
  const double h = (hi - z) / n;
  auto f = [&](double x) {
    const double u = (x - mean) / sd;
    return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * M_PI));
  };
  double s = f(z) + f(hi);
  for (int i = 1; i < n; ++i) s += f(z + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace nego::testing
