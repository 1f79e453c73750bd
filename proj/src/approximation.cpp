#include "mlapprox/approximation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mlapprox {

namespace {

// ceil(eps(a) / eps(b)) as an integer-valued double.
double ceil_ratio(const ErrorBound& epsilon, std::size_t a, std::size_t b) {
  const double ea = epsilon(a);
  const double eb = epsilon(b);
  if (!(ea > 0.0) || !std::isfinite(ea))
    throw std::invalid_argument("epsilon(" + std::to_string(a) + ") must be positive and finite");
  if (!(eb > 0.0) || !std::isfinite(eb))
    throw std::invalid_argument("epsilon(" + std::to_string(b) + ") must be positive and finite");
  const double q = std::ceil(ea / eb);
  if (!std::isfinite(q))
    throw std::overflow_error("epsilon(" + std::to_string(a) + ")/epsilon(" + std::to_string(b) +
                              ") overflows");
  return q;
}

std::size_t power_of_two_exponent(std::size_t m) {
  if (m == 0 || !std::has_single_bit(m))
    throw std::invalid_argument("Q_m is defined for m = 2^k only, got m=" + std::to_string(m));
  return static_cast<std::size_t>(std::countr_zero(m));
}

}  // namespace

Target as_target(const CoefficientFunction& f) {
  return [f, evaluator = BasisEvaluator(f.basis())](std::span<const double> x) mutable {
    return evaluate(f, x, evaluator);
  };
}

std::uint64_t Schedule::total_evaluations() const {
  std::uint64_t total = 0;
  for (auto n : n_levels) {
    if (__builtin_add_overflow(total, n, &total))
      throw std::overflow_error("Schedule: total evaluation count overflows");
  }
  return total;
}

void Schedule::validate(std::size_t N) const {
  if (n_levels.size() != m_levels.size())
    throw std::invalid_argument("Schedule: n and m level vectors differ in length");
  std::size_t prev = 0;
  for (std::size_t j = 0; j < m_levels.size(); ++j) {
    const auto where = " at level " + std::to_string(j + 1);
    if (m_levels[j] < prev) throw std::invalid_argument("Schedule: m decreases" + where);
    if (m_levels[j] > N)
      throw std::invalid_argument("Schedule: m=" + std::to_string(m_levels[j]) + where +
                                  " exceeds basis size " + std::to_string(N));
    if (n_levels[j] == 0 && m_levels[j] != prev)
      throw std::invalid_argument("Schedule: zero-sample level increases m" + where);
    if (n_levels[j] > 0 && m_levels[j] == 0)
      throw std::invalid_argument("Schedule: level with samples estimates no coefficient" + where);
    prev = m_levels[j];
  }
}

Approximant multilevel_run(const Target& f, std::shared_ptr<const SpectralBasis> basis,
                           const Schedule& schedule, const StreamSource& streams,
                           const LevelObserver& observer) {
  if (!basis) throw std::invalid_argument("multilevel_run: null basis");
  schedule.validate(basis->size());

  const bool fourier = basis->is_fourier();
  BasisEvaluator evaluator(*basis);
  std::vector<double> x(static_cast<std::size_t>(basis->dimension()));
  std::vector<cplx> coeffs;
  std::vector<cplx> sums;
  std::uint64_t evals = 0;

  for (std::size_t level = 1; level <= schedule.levels(); ++level) {
    const std::uint64_t nk = schedule.n_levels[level - 1];
    const std::size_t mk = schedule.m_levels[level - 1];
    if (nk > 0) {
      RngStream rng = streams.stream(level, StreamRole::ApproximationLevel);
      const std::size_t prev_m = coeffs.size();
      sums.assign(mk, cplx{});
      for (std::uint64_t i = 0; i < nk; ++i) {
        sample_mu_m(*basis, mk, rng, x);
        const auto values = evaluator.evaluate(x, mk);
        cplx residual = f(x);
        for (std::size_t j = 0; j < prev_m; ++j) residual -= coeffs[j] * values[j];
        double u = 1.0;
        if (!fourier) {
          u = 0.0;
          for (std::size_t j = 0; j < mk; ++j) u += std::norm(values[j]);
          u /= static_cast<double>(mk);
          // u_m(X) = 0 forces every b_j(X) = 0; the contribution is zero.
          if (u == 0.0) continue;
        }
        const cplx w = residual / u;
        for (std::size_t j = 0; j < mk; ++j) sums[j] += w * std::conj(values[j]);
      }
      evals += nk;
      coeffs.resize(mk);
      const double inv_n = 1.0 / static_cast<double>(nk);
      for (std::size_t j = 0; j < mk; ++j) coeffs[j] += sums[j] * inv_n;
    }
    if (observer) observer(level, CoefficientFunction(basis, coeffs));
  }
  return {CoefficientFunction(std::move(basis), std::move(coeffs)), evals};
}

int level_offset(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("r must be finite and >= 0");
  return static_cast<int>(std::ceil(2.0 * r + 1.0));
}

Schedule schedule_a_n_r(std::uint64_t n, double r, std::size_t N) {
  if (n < 1) throw std::invalid_argument("schedule_a_n_r: n must be >= 1");
  if (N < 1) throw std::invalid_argument("schedule_a_n_r: N must be >= 1");
  const int ell = level_offset(r);
  const int k = std::bit_width(n) - 1;
  Schedule s;
  for (int j = 1; j <= k; ++j) {
    if (j <= ell) {
      s.n_levels.push_back(0);
      s.m_levels.push_back(0);
    } else {
      s.n_levels.push_back(std::uint64_t{1} << (j - 1));
      const std::uint64_t m = std::uint64_t{1} << (j - 1 - ell);
      s.m_levels.push_back(static_cast<std::size_t>(std::min<std::uint64_t>(m, N)));
    }
  }
  return s;
}

Approximant a_n_r(const Target& f, std::shared_ptr<const SpectralBasis> basis, std::uint64_t n, double r,
                  const StreamSource& streams, const LevelObserver& observer) {
  if (!basis) throw std::invalid_argument("a_n_r: null basis");
  const Schedule s = schedule_a_n_r(n, r, basis->size());
  return multilevel_run(f, std::move(basis), s, streams, observer);
}

Schedule schedule_q_m(const ErrorBound& epsilon, std::size_t m) {
  const std::size_t k = power_of_two_exponent(m);
  Schedule s;
  for (std::size_t j = 1; j <= k + 1; ++j) {
    const std::size_t lo = j >= 2 ? std::size_t{1} << (j - 2) : 0;
    const double q = ceil_ratio(epsilon, lo, std::size_t{1} << (j - 1));
    if (q >= 0x1.0p64) throw std::overflow_error("schedule_q_m: level sample count exceeds 64 bits");
    std::uint64_t nj = 0;
    if (j >= 64 || __builtin_mul_overflow(static_cast<std::uint64_t>(q), std::uint64_t{1} << j, &nj))
      throw std::overflow_error("schedule_q_m: level sample count exceeds 64 bits");
    s.n_levels.push_back(nj);
    s.m_levels.push_back(std::size_t{1} << (j - 1));
  }
  return s;
}

QmCost q_m_cost(const ErrorBound& epsilon, std::size_t m) {
  using boost::multiprecision::cpp_int;
  const std::size_t k = power_of_two_exponent(m);
  QmCost cost;
  cpp_int max_ratio = 0;
  for (std::size_t j = 0; j <= k; ++j) {
    const std::size_t lo = j >= 1 ? std::size_t{1} << (j - 1) : 0;
    const cpp_int q(ceil_ratio(epsilon, lo, std::size_t{1} << j));
    // Level j+1 of the schedule uses this ratio with 2^{j+1} points.
    cost.total += q << (j + 1);
    max_ratio = std::max(max_ratio, q);
  }
  cost.bound = 4 * cpp_int(m) * max_ratio;
  return cost;
}

Approximant q_m(const Target& f, std::shared_ptr<const SpectralBasis> basis, const ErrorBound& epsilon,
                std::size_t m, const StreamSource& streams, const LevelObserver& observer) {
  if (!basis) throw std::invalid_argument("q_m: null basis");
  const Schedule s = schedule_q_m(epsilon, m);
  return multilevel_run(f, std::move(basis), s, streams, observer);
}

BoundConstants bound_constants(double r) {
  const int ell = level_offset(r);
  BoundConstants c;
  c.r = r;
  c.ell_r = ell;
  c.c_r = std::exp2(r * std::ceil(2.0 * r + 3.0) + 1.0);
  c.cbar_r = std::exp2(r * (ell + 1) + 1.0);
  c.ctilde_r = std::exp2(r * std::ceil(2.0 * r + 4.0) + 1.5);
  return c;
}


void write_schedule_csv(std::ostream& out, const Schedule& schedule) {
  out << "j,n_j,m_j\n";
  for (std::size_t j = 0; j < schedule.levels(); ++j)
    out << j + 1 << ',' << schedule.n_levels[j] << ',' << schedule.m_levels[j] << '\n';
}

void write_approximant_csv(std::ostream& out, const Approximant& approximant) {
  write_coefficients_csv(out, approximant.value);
  out << "# evals_used=" << approximant.evals_used << '\n';
}

}  // namespace mlapprox
