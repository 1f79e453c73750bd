#include "mlapprox/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mlapprox {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Largest multiple of n that fits, minus one.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double RngStream::normal() {
  // 1 - uniform() lies in (0, 1], so the logarithm is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_stream_id(std::uint64_t replication, std::uint64_t level, StreamRole role) {
  std::uint64_t h = splitmix64(replication);
  h = splitmix64(h ^ level);
  return splitmix64(h ^ static_cast<std::uint64_t>(role));
}

void sample_mu(RngStream& rng, std::span<double> x) {
  for (double& v : x) v = rng.uniform();
}

std::size_t sample_mu_m(const SpectralBasis& basis, std::size_t m, RngStream& rng, std::span<double> x) {
  if (m < 1 || m > basis.size())
    throw std::out_of_range("sample_mu_m: m=" + std::to_string(m) + " outside 1.." +
                            std::to_string(basis.size()));
  if (x.size() != static_cast<std::size_t>(basis.dimension()))
    throw std::invalid_argument("sample_mu_m: point dimension mismatch");
  const CustomSystem* sys = basis.custom_system();
  if (sys == nullptr) {
    sample_mu(rng, x);
    return 1;
  }
  const std::size_t i = 1 + static_cast<std::size_t>(rng.uniform_index(m));
  return rejection_sample([&](std::span<const double> p) { return std::norm(sys->evaluate(i, p)); },
                          sys->sup_abs_sq, rng, x);
}

std::size_t rejection_sample(const Density& density, double bound, RngStream& rng, std::span<double> x) {
  if (!(bound > 0.0) || !std::isfinite(bound))
    throw std::invalid_argument("rejection_sample: bound must be positive and finite");
  for (std::size_t proposals = 1;; ++proposals) {
    sample_mu(rng, x);
    const double value = density(x);
    // Relative slack absorbs rounding in densities that touch the bound.
    if (value > bound * (1.0 + 1e-12))
      throw std::domain_error("rejection_sample: density exceeds the supplied bound");
    if (rng.uniform() * bound < value) return proposals;
  }
}

}  // namespace mlapprox
