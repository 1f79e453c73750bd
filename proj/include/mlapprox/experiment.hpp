// Replicated error estimation and convergence studies.
//
// Replication i of grid point g draws its streams from
// StreamSource(seed, (g << 32) | i), so results do not depend on the
// number of worker threads.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "mlapprox/approximation.hpp"
#include "mlapprox/config.hpp"
#include "mlapprox/integration.hpp"

namespace mlapprox {

struct MseEstimate {
  double mean = 0.0;
  double standard_error = 0.0;  // sample standard deviation / sqrt(R)
};

// Mean and standard error of at least two samples.
MseEstimate summarize(std::span<const double> samples);

// Runs fn(0..R-1) on up to `threads` workers; results come back in index
// order.
std::vector<double> replicate(std::size_t R, unsigned threads, const std::function<double(std::size_t)>& fn);

// An approximation algorithm under test: the target plus the streams of
// one replication in, a coefficient function out.
using ApproxAlgorithm = std::function<CoefficientFunction(const CoefficientFunction&, const StreamSource&)>;

// Mean and standard error of R squared L2 errors ||f - alg(f)||_2^2,
// replication i using StreamSource(seed, i).
MseEstimate estimate_mse(const CoefficientFunction& f, const ApproxAlgorithm& algorithm, std::size_t R,
                         std::uint64_t seed, unsigned threads = 1);

// E||f - M^(1) f||_2^2 for one level with m coefficients and n uniform
// points on a Fourier basis:
//   sum_{j<=m} (||f||_2^2 - |c_j|^2) / n + sum_{j>m} |c_j|^2.
double analytic_single_level_mse(const CoefficientFunction& f, std::size_t m, std::uint64_t n);

struct RunRecord {
  std::uint64_t n = 0;
  std::size_t R = 0;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  double rmse = 0.0;
  double sigma_next = 0.0;  // sigma(m_k + 1)
  double bound = 0.0;       // the RMS bound the rmse column is compared against
  std::uint64_t evals_used = 0;
};

// One record per n in the grid. The target is fixed across the grid except
// for hard_instance, which is rebuilt per n against the final level of the
// schedule (the extremal direction for that n).
std::vector<RunRecord> run_convergence(const ExperimentConfig& config);

// Header: n,R,mse_mean,mse_stderr,rmse,sigma_next,bound,evals_used.
void write_run_records(std::ostream& out, std::span<const RunRecord> records);

struct IntegrationRecord {
  std::uint64_t n = 0;  // Q_{2n}^r and S_{2n} are compared
  std::size_t R = 0;
  MseEstimate q_mse;
  MseEstimate s_mse;
  std::uint64_t q_evals = 0;
  std::uint64_t s_evals = 0;
  double q_bound = 0.0;  // c_r n^{-1/2} sigma(n)
  double s_bound = 0.0;  // (2n)^{-1/2}
};

std::vector<IntegrationRecord> run_integration_comparison(const ExperimentConfig& config);

void write_integration_records(std::ostream& out, std::span<const IntegrationRecord> records);

// One approximation run of the configured algorithm (a_n_r or q_m) at n.
Approximant single_run(const ExperimentConfig& config, std::uint64_t n);

}  // namespace mlapprox
