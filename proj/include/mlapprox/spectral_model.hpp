// Weight functions and ordered singular value decompositions of periodic
// Sobolev embeddings on the torus [0,1)^d.
//
// Index convention: every function taking a basis index `j` is 1-based
// (j = 1 is the largest singular value). Storage vectors are 0-based.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlapprox {

using cplx = std::complex<double>;

// Lattice frequency on the torus; its length is the model dimension.
using FrequencyVector = std::vector<int>;

enum class WeightKind { MixedSobolev, IsotropicSobolev, TensorProduct, ExplicitSigma };

// A user-supplied orthonormal system replacing the Fourier functions of an
// ExplicitSigma model.
struct CustomSystem {
  // (j, x) -> b_j(x) with j 1-based.
  std::function<cplx(std::size_t, std::span<const double>)> evaluate;
  // Upper bound on |b_j(x)|^2 over all j and x; drives rejection sampling.
  double sup_abs_sq = 1.0;
  // I(b_j) for j = 1..size(); empty when unknown.
  std::vector<cplx> integrals;
};

struct WeightSpec {
  WeightKind kind = WeightKind::MixedSobolev;
  int r = 1;
  int d = 1;
  // Derivatives carry the 2*pi factor of the torus [0,1)^d when true.
  bool angular = true;
  std::vector<WeightSpec> factors;  // TensorProduct: univariate factors
  std::vector<double> sigma;        // ExplicitSigma: nonincreasing, positive
  std::shared_ptr<const CustomSystem> system;  // ExplicitSigma only, optional

  static WeightSpec mixed(int r, int d, bool angular = true);
  static WeightSpec isotropic(int r, int d, bool angular = true);
  static WeightSpec tensor(std::vector<WeightSpec> factors);
  static WeightSpec explicit_sigma(std::vector<double> sigma, int d = 1);
  static WeightSpec explicit_sigma(std::vector<double> sigma, int d,
                                   std::shared_ptr<const CustomSystem> system);

  // Throws std::invalid_argument on violated invariants.
  void validate() const;

  // Flat `key=value` form, e.g. "spec=mixed r=1 d=2 angular=true".
  std::string describe() const;
};

// Inverse of WeightSpec::describe(). Reads the keys spec, r, d, angular,
// sigma and factors; other keys are ignored. Errors name the offending key.
WeightSpec parse_weight_spec(const std::map<std::string, std::string>& fields);

// Splits "a=1 b=2" into key/value pairs.
std::map<std::string, std::string> parse_fields(std::string_view line);

// F-norm of the L2-normalized exponential exp(2*pi*i<k,x>). Returns +inf for
// frequencies outside a finite ExplicitSigma model.
double weight(const WeightSpec& spec, const FrequencyVector& k);

class SpectralBasis {
 public:
  SpectralBasis(WeightSpec spec, std::vector<FrequencyVector> frequencies,
                std::vector<double> sigma);

  const WeightSpec& spec() const { return spec_; }
  std::size_t size() const { return sigma_.size(); }
  int dimension() const { return spec_.d; }

  double sigma(std::size_t j) const;
  std::span<const double> sigmas() const { return sigma_; }

  // Empty for custom systems, where frequencies carry no meaning.
  const FrequencyVector& frequency(std::size_t j) const;
  bool has_frequencies() const { return !frequencies_.empty(); }

  bool is_fourier() const { return spec_.system == nullptr; }
  const CustomSystem* custom_system() const { return spec_.system.get(); }

  // 1-based index of the zero frequency, 0 if absent.
  std::size_t zero_frequency_index() const { return zero_index_; }

  // Largest |k_c| among the first m frequencies, per coordinate c.
  int max_abs_frequency(std::size_t m, int coordinate) const;
  const int* frequency_data() const { return flat_.data(); }

 private:
  WeightSpec spec_;
  std::vector<FrequencyVector> frequencies_;
  std::vector<double> sigma_;
  std::vector<int> flat_;        // N * d, row major
  std::vector<int> prefix_max_;  // N * d running max of |k_c|
  std::size_t zero_index_ = 0;
};

// The N frequencies of smallest weight, ordered by (weight, |k|_1,
// lexicographic). ExplicitSigma models cap N at their sequence length.
std::shared_ptr<const SpectralBasis> enumerate_basis(const WeightSpec& spec, std::size_t N);

// exp(2*pi*i<k_j,x>) for Fourier bases, the custom evaluator otherwise.
cplx evaluate_basis(const SpectralBasis& basis, std::size_t j, std::span<const double> x);

// u_m(x) = (1/m) sum_{j<=m} |b_j(x)|^2.
double density_u_m(const SpectralBasis& basis, std::size_t m, std::span<const double> x);

// r / (2 + ln d).
double preasymptotic_exponent(double r, int d);

// Evaluates b_1(x), ..., b_m(x) in one sweep. Fourier values come from
// per-coordinate power tables built by recurrence. Not thread-safe; use
// one evaluator per thread.
class BasisEvaluator {
 public:
  explicit BasisEvaluator(const SpectralBasis& basis);

  std::span<const cplx> evaluate(std::span<const double> x, std::size_t m);

 private:
  const SpectralBasis* basis_;
  std::vector<cplx> values_;
  std::vector<cplx> powers_;
  std::vector<std::size_t> offsets_;
};

// CSV with columns j, k_1..k_d, sigma (j, sigma for custom systems).
void write_basis_csv(std::ostream& out, const SpectralBasis& basis);

}  // namespace mlapprox
