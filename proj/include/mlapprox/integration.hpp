// Integration with respect to mu: direct simulation, the control-variate
// rule Q_{2n}^r built on A_n^r, and explicit error bound calculators.

#pragma once

#include <cstdint>
#include <memory>

#include "mlapprox/approximation.hpp"

namespace mlapprox {

struct IntegralEstimate {
  cplx value;
  std::uint64_t evals_used = 0;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
};

// I(b_j): the Kronecker delta of the zero frequency for Fourier bases, the
// supplied table for custom systems (std::invalid_argument if absent).
cplx integral_of_basis(const SpectralBasis& basis, std::size_t j);

// Exact I(f) = sum_j c_j I(b_j).
cplx integral(const CoefficientFunction& f);

// Q_{2n}^r(f) = I(A_n^r f) + (1/n) sum_{i<=n} (f - A_n^r f)(X_i), X_i ~ mu on
// a stream disjoint from those of A_n^r.
IntegralEstimate q_2n_r(const Target& f, std::shared_ptr<const SpectralBasis> basis, std::uint64_t n,
                        double r, const StreamSource& streams);

// Same rule, also returning the control variate A_n^r f it used.
struct ControlVariateResult {
  IntegralEstimate estimate;
  Approximant control;
};
ControlVariateResult q_2n_r_with_control(const Target& f, std::shared_ptr<const SpectralBasis> basis,
                                         std::uint64_t n, double r, const StreamSource& streams);

// S_n(f) = (1/n) sum f(X_i) with X_i uniform on [0,1)^d.
IntegralEstimate direct_simulation(const Target& f, int d, std::uint64_t n, const StreamSource& streams);

// n^{-1/2}: worst-case error of S_n on the unit ball when sigma(1) <= 1.
double direct_simulation_bound(double n);

// C = 2^{p ceil(2p+4) + 1}, p = r / (2 + ln d).
double integration_constant(double r, int d);

// C n^{-p-1/2}: bound for Q_{2n}^p on the mixed Sobolev torus.
double integration_bound(double n, double r, int d);

// 2 (2^{ceil(2p+4)} / n)^p: bound for A_n^p on the mixed Sobolev torus.
double approx_bound(double n, double r, int d);

}  // namespace mlapprox
