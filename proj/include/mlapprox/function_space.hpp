// Target functions as finite coefficient vectors in a spectral basis.

#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mlapprox/spectral_model.hpp"

namespace mlapprox {

class RngStream;

// f = sum_j c_j b_j with coeffs()[j-1] = c_j = <f, b_j>_2.
class CoefficientFunction {
 public:
  CoefficientFunction(std::shared_ptr<const SpectralBasis> basis, std::vector<cplx> coeffs);
  // The zero function.
  explicit CoefficientFunction(std::shared_ptr<const SpectralBasis> basis);

  const SpectralBasis& basis() const { return *basis_; }
  const std::shared_ptr<const SpectralBasis>& basis_ptr() const { return basis_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  // c_j, zero beyond size().
  cplx coefficient(std::size_t j) const;

  CoefficientFunction operator+(const CoefficientFunction& other) const;
  CoefficientFunction operator*(cplx scale) const;

 private:
  std::shared_ptr<const SpectralBasis> basis_;
  std::vector<cplx> coeffs_;
};

cplx evaluate(const CoefficientFunction& f, std::span<const double> x);
// Same, reusing the evaluator's scratch space.
cplx evaluate(const CoefficientFunction& f, std::span<const double> x, BasisEvaluator& evaluator);

double l2_norm(const CoefficientFunction& f);
double f_norm(const CoefficientFunction& f);

// Truncation to the first m coefficients (orthogonal projection P_m).
CoefficientFunction project(const CoefficientFunction& f, std::size_t m);

// ||f - g||_2 by Parseval; throws if the bases differ.
double exact_l2_error(const CoefficientFunction& f, const CoefficientFunction& g);
double exact_l2_error_squared(const CoefficientFunction& f, const CoefficientFunction& g);

// sigma(m+1) b_{m+1}: unit F-norm, orthogonal to span(b_1..b_m).
CoefficientFunction hard_instance(std::shared_ptr<const SpectralBasis> basis, std::size_t m);

// c_k = sqrt(sigma(k)^2 - sigma(k+1)^2) for k < s, c_s = sigma(s), so that
// ||f - P_m f||_2 = sigma(m+1) for every m < s.
CoefficientFunction weak_instance(std::shared_ptr<const SpectralBasis> basis, std::size_t s);

// Uniform direction on the complex unit sphere of dimension s, coordinate j
// scaled by sigma(j). The result has unit F-norm.
CoefficientFunction random_unit_ball(std::shared_ptr<const SpectralBasis> basis, std::size_t s,
                                     RngStream& rng);

// First line: "# <WeightSpec::describe()> N=<basis size>", then j,re,im rows.
void write_coefficients_csv(std::ostream& out, const CoefficientFunction& f);
// Reads the format above, rebuilding the basis from its header line.
CoefficientFunction read_coefficients_csv(std::istream& in);

}  // namespace mlapprox
