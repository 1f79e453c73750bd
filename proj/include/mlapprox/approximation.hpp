// Multilevel Monte Carlo approximation from point values.
//
// M^(k) refines the previous approximant by importance-weighted Monte Carlo
// estimates of the m_k leading coefficients of the residual, using n_k
// points drawn from mu_{m_k}. A_n^r and Q_m are two schedules for it.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mlapprox/function_space.hpp"
#include "mlapprox/sampling.hpp"

namespace mlapprox {

// Point evaluation of the function being approximated. A Target is called
// from one thread at a time.
using Target = std::function<cplx(std::span<const double>)>;

// Wraps a coefficient function as a point-evaluation target.
Target as_target(const CoefficientFunction& f);

struct Schedule {
  std::vector<std::uint64_t> n_levels;  // n_1..n_k
  std::vector<std::size_t> m_levels;    // m_1..m_k

  std::size_t levels() const { return n_levels.size(); }
  std::size_t final_m() const { return m_levels.empty() ? 0 : m_levels.back(); }
  std::uint64_t total_evaluations() const;

  // m nondecreasing and at most N; a zero-sample level keeps m unchanged.
  void validate(std::size_t N) const;
};

struct Approximant {
  CoefficientFunction value;
  std::uint64_t evals_used = 0;
};

// Called after each level with the level number (1-based) and M^(level) f.
using LevelObserver = std::function<void(std::size_t, const CoefficientFunction&)>;

Approximant multilevel_run(const Target& f, std::shared_ptr<const SpectralBasis> basis,
                           const Schedule& schedule, const StreamSource& streams,
                           const LevelObserver& observer = {});

// ceil(2r + 1).
int level_offset(double r);

// k = floor(log2 n) levels; n_j = 2^{j-1} and m_j = min(2^{j-1-l}, N) past
// the first l = level_offset(r) levels, which are empty. Uses fewer than n
// evaluations.
Schedule schedule_a_n_r(std::uint64_t n, double r, std::size_t N);

Approximant a_n_r(const Target& f, std::shared_ptr<const SpectralBasis> basis, std::uint64_t n, double r,
                  const StreamSource& streams, const LevelObserver& observer = {});

// Upper bounds eps(m) >= ||f - P_m f||_2^2, defined on m = 0, 1, 2, ...
using ErrorBound = std::function<double(std::size_t)>;

// Q_m for m = 2^k: k+1 levels with m_j = 2^{j-1} and
// n_j = 2^j * ceil(eps(floor(2^{j-2})) / eps(2^{j-1})).
// Throws std::invalid_argument if m is not a power of two and
// std::overflow_error if a level count does not fit in 64 bits.
Schedule schedule_q_m(const ErrorBound& epsilon, std::size_t m);

// Exact evaluation count of Q_m and the bound
// 4 m max_{0<=j<=k} ceil(eps(floor(2^{j-1})) / eps(2^j)), in arbitrary
// precision so that schedules too large to run can still be checked.
struct QmCost {
  boost::multiprecision::cpp_int total;
  boost::multiprecision::cpp_int bound;
};
QmCost q_m_cost(const ErrorBound& epsilon, std::size_t m);

Approximant q_m(const Target& f, std::shared_ptr<const SpectralBasis> basis, const ErrorBound& epsilon,
                std::size_t m, const StreamSource& streams, const LevelObserver& observer = {});

struct BoundConstants {
  double r = 0.0;
  double ell_r = 0.0;     // ceil(2r + 1)
  double c_r = 0.0;       // 2^{r ceil(2r+3) + 1}
  double cbar_r = 0.0;    // 2^{r (ell_r + 1) + 1}
  double ctilde_r = 0.0;  // 2^{r ceil(2r+4) + 3/2}
};

BoundConstants bound_constants(double r);


// Columns j, n_j, m_j.
void write_schedule_csv(std::ostream& out, const Schedule& schedule);
// Coefficient CSV followed by a "# evals_used=<count>" footer line.
void write_approximant_csv(std::ostream& out, const Approximant& approximant);

}  // namespace mlapprox
