// Independent reference computations for the test suites. Nothing here
// calls into the library's weight or enumeration code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

inline double axis_term(int k, bool angular) {
  const double base = angular ? 2.0 * std::numbers::pi * k : static_cast<double>(k);
  return base * base;
}

// prod_c sqrt(sum_{a=0}^r t_c^a), summed term by term.
inline double mixed_weight(int r, bool angular, const std::vector<int>& k) {
  double w = 1.0;
  for (int kc : k) {
    double s = 0.0;
    for (int a = 0; a <= r; ++a) s += std::pow(axis_term(kc, angular), a);
    w *= std::sqrt(s);
  }
  return w;
}

inline void each_multi_index(std::size_t d, int budget, std::vector<int>& alpha, std::size_t c,
                             const std::function<void(const std::vector<int>&)>& visit) {
  if (c == d) {
    visit(alpha);
    return;
  }
  for (int a = 0; a <= budget; ++a) {
    alpha[c] = a;
    each_multi_index(d, budget - a, alpha, c + 1, visit);
  }
  alpha[c] = 0;
}

// sqrt(sum_{|alpha|_1 <= r} prod_c t_c^{alpha_c}) by listing every alpha.
inline double isotropic_weight(int r, bool angular, const std::vector<int>& k) {
  std::vector<int> alpha(k.size(), 0);
  double s = 0.0;
  each_multi_index(k.size(), r, alpha, 0, [&](const std::vector<int>& a) {
    double term = 1.0;
    for (std::size_t c = 0; c < k.size(); ++c) term *= std::pow(axis_term(k[c], angular), a[c]);
    s += term;
  });
  return std::sqrt(s);
}

inline std::size_t count_multi_indices(std::size_t d, int r) {
  std::vector<int> alpha(d, 0);
  std::size_t n = 0;
  each_multi_index(d, r, alpha, 0, [&](const std::vector<int>&) { ++n; });
  return n;
}

struct Entry {
  std::vector<int> k;
  double w;
};

// All frequencies in {-K..K}^d with their weights, sorted ascending.
inline std::vector<Entry> box_enumeration(std::size_t d, int K,
                                          const std::function<double(const std::vector<int>&)>& w) {
  std::vector<Entry> out;
  std::vector<int> k(d, -K);
  while (true) {
    out.push_back({k, w(k)});
    std::size_t c = 0;
    while (c < d && k[c] == K) k[c++] = -K;
    if (c == d) break;
    ++k[c];
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.w < b.w; });
  return out;
}

// Smallest weight on the boundary of the box {-K..K}^d.
inline double boundary_min(std::size_t d, int K, const std::function<double(const std::vector<int>&)>& w) {
  double best = INFINITY;
  for (const auto& e : box_enumeration(d, K, w)) {
    bool edge = false;
    for (int v : e.k) edge = edge || std::abs(v) == K;
    if (edge) best = std::min(best, e.w);
  }
  return best;
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample standard deviation / sqrt(n).
inline double standard_error(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

// Upper tail p-value of Pearson's statistic against expected bin masses.
inline double chi_squared_p_value(std::span<const std::size_t> counts, std::span<const double> masses) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = total * masses[i];
    stat += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
  }
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Kolmogorov-Smirnov distance of a sample to the uniform law on [0,1).
inline double ks_uniform_distance(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - v[i]);
    d = std::max(d, v[i] - static_cast<double>(i) / n);
  }
  return d;
}

// Asymptotic one-sample critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
inline double ks_critical(double alpha, std::size_t n) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double nn = static_cast<double>(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

}  // namespace oracle
