#include "mlapprox/integration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlapprox {

cplx integral_of_basis(const SpectralBasis& basis, std::size_t j) {
  if (j < 1 || j > basis.size())
    throw std::out_of_range("integral_of_basis: index " + std::to_string(j) + " out of range");
  if (const auto* sys = basis.custom_system()) {
    if (sys->integrals.size() < j)
      throw std::invalid_argument("integral_of_basis: no integral table entry for b_" + std::to_string(j) +
                                  " of a custom system");
    return sys->integrals[j - 1];
  }
  return j == basis.zero_frequency_index() ? cplx{1.0} : cplx{};
}

cplx integral(const CoefficientFunction& f) {
  cplx sum{};
  const auto c = f.coeffs();
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == cplx{}) continue;
    sum += c[j] * integral_of_basis(f.basis(), j + 1);
  }
  return sum;
}

ControlVariateResult q_2n_r_with_control(const Target& f, std::shared_ptr<const SpectralBasis> basis,
                                         std::uint64_t n, double r, const StreamSource& streams) {
  if (n < 1) throw std::invalid_argument("q_2n_r: n must be >= 1");
  Approximant control = a_n_r(f, basis, n, r, streams);
  const CoefficientFunction& g = control.value;

  BasisEvaluator evaluator(*basis);
  std::vector<double> x(static_cast<std::size_t>(basis->dimension()));
  RngStream rng = streams.stream(0, StreamRole::IntegrationResidual);
  cplx sum{};
  for (std::uint64_t i = 0; i < n; ++i) {
    sample_mu(rng, x);
    sum += f(x) - evaluate(g, x, evaluator);
  }
  IntegralEstimate est;
  est.value = integral(g) + sum / static_cast<double>(n);
  est.evals_used = control.evals_used + n;
  est.seed = streams.seed();
  est.replication = streams.replication();
  return {est, std::move(control)};
}

IntegralEstimate q_2n_r(const Target& f, std::shared_ptr<const SpectralBasis> basis, std::uint64_t n,
                        double r, const StreamSource& streams) {
  return q_2n_r_with_control(f, std::move(basis), n, r, streams).estimate;
}

IntegralEstimate direct_simulation(const Target& f, int d, std::uint64_t n, const StreamSource& streams) {
  if (n < 1) throw std::invalid_argument("direct_simulation: n must be >= 1");
  if (d < 1) throw std::invalid_argument("direct_simulation: d must be >= 1");
  std::vector<double> x(static_cast<std::size_t>(d));
  RngStream rng = streams.stream(0, StreamRole::DirectSimulation);
  cplx sum{};
  for (std::uint64_t i = 0; i < n; ++i) {
    sample_mu(rng, x);
    sum += f(x);
  }
  return {sum / static_cast<double>(n), n, streams.seed(), streams.replication()};
}

double direct_simulation_bound(double n) {
  if (!(n >= 1.0)) throw std::invalid_argument("direct_simulation_bound: n must be >= 1");
  return 1.0 / std::sqrt(n);
}

double integration_constant(double r, int d) {
  const double p = preasymptotic_exponent(r, d);
  return std::exp2(p * std::ceil(2.0 * p + 4.0) + 1.0);
}

double integration_bound(double n, double r, int d) {
  if (!(n >= 1.0)) throw std::invalid_argument("integration_bound: n must be >= 1");
  const double p = preasymptotic_exponent(r, d);
  return integration_constant(r, d) * std::pow(n, -p - 0.5);
}

double approx_bound(double n, double r, int d) {
  if (!(n >= 1.0)) throw std::invalid_argument("approx_bound: n must be >= 1");
  const double p = preasymptotic_exponent(r, d);
  return 2.0 * std::pow(std::exp2(std::ceil(2.0 * p + 4.0)) / n, p);
}

}  // namespace mlapprox
