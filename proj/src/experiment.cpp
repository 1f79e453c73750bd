#include "mlapprox/experiment.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "mlapprox/csv.hpp"

namespace mlapprox {

namespace {

std::uint64_t replication_id(std::size_t grid_index, std::size_t rep) {
  return (static_cast<std::uint64_t>(grid_index) << 32) | static_cast<std::uint64_t>(rep);
}

// Everything a study needs that is shared, immutable, across replications.
struct Study {
  const ExperimentConfig& config;
  std::shared_ptr<const SpectralBasis> basis;
  ErrorBound epsilon;
  std::optional<CoefficientFunction> fixed_target;

  explicit Study(const ExperimentConfig& cfg) : config(cfg), basis(enumerate_basis(cfg.spec, cfg.N)) {
    const std::size_t size = basis->size();
    const std::uint64_t n_max = cfg.n_grid.back();
    switch (cfg.algorithm) {
      case Algorithm::ANR:
      case Algorithm::Q2NR:
        if (size < n_max)
          throw ConfigError("N", "basis has " + std::to_string(size) + " entries; sigma(n) needs at least " +
                                     std::to_string(n_max));
        break;
      case Algorithm::QM:
        if (size < n_max + 1)
          throw ConfigError("N", "basis has " + std::to_string(size) + " entries; Q_m needs at least m+1 = " +
                                     std::to_string(n_max + 1));
        break;
      case Algorithm::DirectSimulation: break;
    }
    if (cfg.epsilon_table.empty()) {
      auto b = basis;
      epsilon = [b](std::size_t m) {
        const double s = b->sigma(m + 1);
        return s * s;
      };
    } else {
      epsilon = [table = cfg.epsilon_table](std::size_t m) { return table.at(m); };
    }

    const std::size_t s = cfg.target_size.value_or(size);
    if (s > size)
      throw ConfigError("target_size", std::to_string(s) + " exceeds basis size " + std::to_string(size));
    switch (cfg.target) {
      case TargetKind::HardInstance: break;
      case TargetKind::WeakInstance: fixed_target = weak_instance(basis, s); break;
      case TargetKind::RandomUnitBall: {
        RngStream rng(cfg.seed, derive_stream_id(0, 0, StreamRole::TargetDraw));
        fixed_target = random_unit_ball(basis, s, rng);
        break;
      }
      case TargetKind::CoefficientFile: fixed_target = load_file_target(); break;
    }
  }

  CoefficientFunction load_file_target() const {
    std::ifstream in(config.target_file);
    if (!in) throw ConfigError("target_file", "cannot open '" + config.target_file + "'");
    CoefficientFunction loaded = [&] {
      try {
        return read_coefficients_csv(in);
      } catch (const std::exception& e) {
        throw ConfigError("target_file", e.what());
      }
    }();
    if (loaded.basis().spec().describe() != basis->spec().describe())
      throw ConfigError("target_file", "file basis '" + loaded.basis().spec().describe() +
                                           "' differs from the configured spec");
    if (loaded.size() > basis->size())
      throw ConfigError("target_file", "file has more coefficients than the configured basis");
    const auto c = loaded.coeffs();
    return {basis, std::vector<cplx>(c.begin(), c.end())};
  }

  double order() const { return config.algorithm_order(); }

  // m_k of the run at grid value n.
  std::size_t final_m(std::uint64_t n) const {
    switch (config.algorithm) {
      case Algorithm::ANR:
      case Algorithm::Q2NR: return schedule_a_n_r(n, order(), basis->size()).final_m();
      case Algorithm::QM: return static_cast<std::size_t>(n);
      case Algorithm::DirectSimulation: return 0;
    }
    return 0;
  }

  CoefficientFunction target_for(std::uint64_t n) const {
    if (fixed_target) return *fixed_target;
    return hard_instance(basis, final_m(n));
  }

  std::uint64_t evals_for(std::uint64_t n) const {
    switch (config.algorithm) {
      case Algorithm::ANR: return schedule_a_n_r(n, order(), basis->size()).total_evaluations();
      case Algorithm::QM: return schedule_q_m(epsilon, static_cast<std::size_t>(n)).total_evaluations();
      case Algorithm::Q2NR: return schedule_a_n_r(n, order(), basis->size()).total_evaluations() + n;
      case Algorithm::DirectSimulation: return n;
    }
    return 0;
  }

  double bound_for(std::uint64_t n) const {
    switch (config.algorithm) {
      case Algorithm::ANR: return bound_constants(order()).c_r * basis->sigma(n);
      case Algorithm::QM: return std::sqrt(2.0 * epsilon(static_cast<std::size_t>(n)));
      case Algorithm::Q2NR:
        return bound_constants(order()).c_r * basis->sigma(n) / std::sqrt(static_cast<double>(n));
      case Algorithm::DirectSimulation: return direct_simulation_bound(static_cast<double>(n));
    }
    return 0.0;
  }

  double squared_error(const CoefficientFunction& f, std::uint64_t n, const StreamSource& streams) const {
    const Target t = as_target(f);
    switch (config.algorithm) {
      case Algorithm::ANR:
        return exact_l2_error_squared(f, a_n_r(t, basis, n, order(), streams).value);
      case Algorithm::QM:
        return exact_l2_error_squared(f, q_m(t, basis, epsilon, static_cast<std::size_t>(n), streams).value);
      case Algorithm::Q2NR:
        return std::norm(integral(f) - q_2n_r(t, basis, n, order(), streams).value);
      case Algorithm::DirectSimulation:
        return std::norm(integral(f) - direct_simulation(t, basis->dimension(), n, streams).value);
    }
    return 0.0;
  }
};

}  // namespace

MseEstimate summarize(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("summarize: need at least two samples");
  const double R = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= R;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (R - 1.0)) / std::sqrt(R)};
}

std::vector<double> replicate(std::size_t R, unsigned threads, const std::function<double(std::size_t)>& fn) {
  std::vector<double> results(R);
  const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), R);
  if (workers <= 1) {
    for (std::size_t i = 0; i < R; ++i) results[i] = fn(i);
    return results;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < R; i += workers) results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

MseEstimate estimate_mse(const CoefficientFunction& f, const ApproxAlgorithm& algorithm, std::size_t R,
                         std::uint64_t seed, unsigned threads) {
  const auto errors = replicate(R, threads, [&](std::size_t i) {
    return exact_l2_error_squared(f, algorithm(f, StreamSource(seed, i)));
  });
  return summarize(errors);
}

double analytic_single_level_mse(const CoefficientFunction& f, std::size_t m, std::uint64_t n) {
  if (!f.basis().is_fourier())
    throw std::invalid_argument("analytic_single_level_mse: only Fourier bases are supported");
  if (n < 1) throw std::invalid_argument("analytic_single_level_mse: n must be >= 1");
  if (m > f.basis().size()) throw std::out_of_range("analytic_single_level_mse: m exceeds basis size");
  const double norm2 = l2_norm(f) * l2_norm(f);
  double variance = 0.0;
  double tail = 0.0;
  const auto c = f.coeffs();
  for (std::size_t j = 0; j < m; ++j) variance += norm2 - std::norm(j < c.size() ? c[j] : cplx{});
  for (std::size_t j = m; j < c.size(); ++j) tail += std::norm(c[j]);
  return variance / static_cast<double>(n) + tail;
}

std::vector<RunRecord> run_convergence(const ExperimentConfig& config) {
  const Study study(config);
  std::vector<RunRecord> records;
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    const std::uint64_t n = config.n_grid[g];
    const CoefficientFunction f = study.target_for(n);
    const auto errors = replicate(config.replications, config.threads, [&](std::size_t rep) {
      return study.squared_error(f, n, StreamSource(config.seed, replication_id(g, rep)));
    });
    const MseEstimate mse = summarize(errors);
    RunRecord rec;
    rec.n = n;
    rec.R = config.replications;
    rec.mse_mean = mse.mean;
    rec.mse_stderr = mse.standard_error;
    rec.rmse = std::sqrt(mse.mean);
    const std::size_t m = study.final_m(n);
    rec.sigma_next = m + 1 <= study.basis->size() ? study.basis->sigma(m + 1) : 0.0;
    rec.bound = study.bound_for(n);
    rec.evals_used = study.evals_for(n);
    records.push_back(rec);
  }
  return records;
}

void write_run_records(std::ostream& out, std::span<const RunRecord> records) {
  out << "n,R,mse_mean,mse_stderr,rmse,sigma_next,bound,evals_used\n";
  for (const auto& r : records)
    out << r.n << ',' << r.R << ',' << format_double(r.mse_mean) << ',' << format_double(r.mse_stderr) << ','
        << format_double(r.rmse) << ',' << format_double(r.sigma_next) << ',' << format_double(r.bound) << ','
        << r.evals_used << '\n';
}

std::vector<IntegrationRecord> run_integration_comparison(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.algorithm = Algorithm::Q2NR;
  const Study study(cfg);
  const double r = study.order();
  std::vector<IntegrationRecord> records;
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    const std::uint64_t n = cfg.n_grid[g];
    const CoefficientFunction f = study.target_for(n);
    const cplx exact = integral(f);
    std::vector<double> q_err(cfg.replications);
    const auto s_err = replicate(cfg.replications, cfg.threads, [&](std::size_t rep) {
      const StreamSource streams(cfg.seed, replication_id(g, rep));
      const Target t = as_target(f);
      q_err[rep] = std::norm(exact - q_2n_r(t, study.basis, n, r, streams).value);
      return std::norm(exact - direct_simulation(t, study.basis->dimension(), 2 * n, streams).value);
    });
    IntegrationRecord rec;
    rec.n = n;
    rec.R = cfg.replications;
    rec.q_mse = summarize(q_err);
    rec.s_mse = summarize(s_err);
    rec.q_evals = study.evals_for(n);
    rec.s_evals = 2 * n;
    rec.q_bound = study.bound_for(n);
    rec.s_bound = direct_simulation_bound(static_cast<double>(2 * n));
    records.push_back(rec);
  }
  return records;
}

void write_integration_records(std::ostream& out, std::span<const IntegrationRecord> records) {
  out << "n,R,q_mse,q_stderr,q_evals,q_bound,s_mse,s_stderr,s_evals,s_bound\n";
  for (const auto& r : records)
    out << r.n << ',' << r.R << ',' << format_double(r.q_mse.mean) << ',' << format_double(r.q_mse.standard_error)
        << ',' << r.q_evals << ',' << format_double(r.q_bound) << ',' << format_double(r.s_mse.mean) << ','
        << format_double(r.s_mse.standard_error) << ',' << r.s_evals << ',' << format_double(r.s_bound) << '\n';
}

Approximant single_run(const ExperimentConfig& config, std::uint64_t n) {
  if (config.algorithm != Algorithm::ANR && config.algorithm != Algorithm::QM)
    throw ConfigError("algorithm", "approx runs a_n_r or q_m, not " + std::string(algorithm_name(config.algorithm)));
  ExperimentConfig cfg = config;
  cfg.n_grid = {n};
  const Study study(cfg);
  const CoefficientFunction f = study.target_for(n);
  const Target t = as_target(f);
  const StreamSource streams(cfg.seed, 0);
  if (cfg.algorithm == Algorithm::ANR) return a_n_r(t, study.basis, n, study.order(), streams);
  return q_m(t, study.basis, study.epsilon, static_cast<std::size_t>(n), streams);
}

}  // namespace mlapprox
