// Seeded random streams and samplers for the base measure mu (Lebesgue on
// the torus) and the spectral measures mu_m.

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>

#include "mlapprox/spectral_model.hpp"

namespace mlapprox {

// A 64-bit Mersenne Twister seeded with std::seed_seq over the four 32-bit
// halves of (seed, stream_id). Both algorithms are fixed by the C++
// standard, and the floating point conversions below are done by hand, so
// a (seed, stream_id) pair replays bit-identically on every platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64() { return engine_(); }
  // Top 53 bits scaled into [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n), n >= 1, by rejection of the biased tail.
  std::uint64_t uniform_index(std::uint64_t n);
  // Standard normal via Box-Muller (one variate per call).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

enum class StreamRole : std::uint64_t {
  ApproximationLevel = 1,
  IntegrationResidual = 2,
  DirectSimulation = 3,
  TargetDraw = 4,
};

// splitmix64 finalizer chained over replication, level and role.
std::uint64_t derive_stream_id(std::uint64_t replication, std::uint64_t level, StreamRole role);

// Hands out the independent streams of one replication.
class StreamSource {
 public:
  StreamSource(std::uint64_t seed, std::uint64_t replication)
      : seed_(seed), replication_(replication) {}

  RngStream stream(std::uint64_t level, StreamRole role) const {
    return RngStream(seed_, derive_stream_id(replication_, level, role));
  }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t replication() const { return replication_; }

 private:
  std::uint64_t seed_;
  std::uint64_t replication_;
};

// Uniform point on [0,1)^d, d = x.size().
void sample_mu(RngStream& rng, std::span<double> x);

// Point with density u_m with respect to mu. Fourier bases have u_m = 1 and
// sample mu directly; custom systems pick i uniformly in 1..m and draw from
// |b_i|^2 dmu by rejection. Returns the number of uniform proposals used.
std::size_t sample_mu_m(const SpectralBasis& basis, std::size_t m, RngStream& rng, std::span<double> x);

using Density = std::function<double(std::span<const double>)>;

// Exact draw from density/||density||_1 with uniform proposals on [0,1)^d.
// Requires density <= bound up to a relative 1e-12; a violation detected at
// a proposal throws std::domain_error. Returns the number of proposals used.
std::size_t rejection_sample(const Density& density, double bound, RngStream& rng, std::span<double> x);

}  // namespace mlapprox
