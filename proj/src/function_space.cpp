#include "mlapprox/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mlapprox/csv.hpp"
#include "mlapprox/sampling.hpp"

namespace mlapprox {

namespace {

void require_same_basis(const CoefficientFunction& f, const CoefficientFunction& g, const char* op) {
  const auto& a = f.basis();
  const auto& b = g.basis();
  const bool same = &a == &b || (a.size() == b.size() && a.spec().system == b.spec().system &&
                                 a.spec().describe() == b.spec().describe());
  if (!same)
    throw std::invalid_argument(std::string(op) + ": functions live in different bases");
}

}  // namespace

CoefficientFunction::CoefficientFunction(std::shared_ptr<const SpectralBasis> basis,
                                         std::vector<cplx> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw std::invalid_argument("CoefficientFunction: null basis");
  if (coeffs_.size() > basis_->size())
    throw std::invalid_argument("CoefficientFunction: " + std::to_string(coeffs_.size()) +
                                " coefficients exceed basis size " + std::to_string(basis_->size()));
}

CoefficientFunction::CoefficientFunction(std::shared_ptr<const SpectralBasis> basis)
    : CoefficientFunction(std::move(basis), {}) {}

cplx CoefficientFunction::coefficient(std::size_t j) const {
  if (j < 1) throw std::out_of_range("coefficient: index is 1-based");
  return j <= coeffs_.size() ? coeffs_[j - 1] : cplx{};
}

CoefficientFunction CoefficientFunction::operator+(const CoefficientFunction& other) const {
  require_same_basis(*this, other, "operator+");
  std::vector<cplx> sum(std::max(size(), other.size()));
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = coefficient(i + 1) + other.coefficient(i + 1);
  return {basis_, std::move(sum)};
}

CoefficientFunction CoefficientFunction::operator*(cplx scale) const {
  std::vector<cplx> scaled(coeffs_);
  for (auto& c : scaled) c *= scale;
  return {basis_, std::move(scaled)};
}

cplx evaluate(const CoefficientFunction& f, std::span<const double> x, BasisEvaluator& evaluator) {
  const auto values = evaluator.evaluate(x, f.size());
  const auto c = f.coeffs();
  cplx sum{};
  for (std::size_t j = 0; j < c.size(); ++j) sum += c[j] * values[j];
  return sum;
}

cplx evaluate(const CoefficientFunction& f, std::span<const double> x) {
  BasisEvaluator evaluator(f.basis());
  return evaluate(f, x, evaluator);
}

double l2_norm(const CoefficientFunction& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs()) s += std::norm(c);
  return std::sqrt(s);
}

double f_norm(const CoefficientFunction& f) {
  double s = 0.0;
  const auto sigma = f.basis().sigmas();
  const auto c = f.coeffs();
  for (std::size_t j = 0; j < c.size(); ++j) s += std::norm(c[j]) / (sigma[j] * sigma[j]);
  return std::sqrt(s);
}

CoefficientFunction project(const CoefficientFunction& f, std::size_t m) {
  if (m > f.basis().size())
    throw std::out_of_range("project: m=" + std::to_string(m) + " exceeds basis size");
  const auto c = f.coeffs();
  return {f.basis_ptr(), std::vector<cplx>(c.begin(), c.begin() + static_cast<long>(std::min(m, c.size())))};
}

double exact_l2_error_squared(const CoefficientFunction& f, const CoefficientFunction& g) {
  require_same_basis(f, g, "exact_l2_error");
  const std::size_t n = std::max(f.size(), g.size());
  double s = 0.0;
  for (std::size_t j = 1; j <= n; ++j) s += std::norm(f.coefficient(j) - g.coefficient(j));
  return s;
}

double exact_l2_error(const CoefficientFunction& f, const CoefficientFunction& g) {
  return std::sqrt(exact_l2_error_squared(f, g));
}

CoefficientFunction hard_instance(std::shared_ptr<const SpectralBasis> basis, std::size_t m) {
  if (m + 1 > basis->size())
    throw std::out_of_range("hard_instance: m+1=" + std::to_string(m + 1) + " exceeds basis size " +
                            std::to_string(basis->size()));
  std::vector<cplx> c(m + 1);
  c[m] = basis->sigma(m + 1);
  return {std::move(basis), std::move(c)};
}

CoefficientFunction weak_instance(std::shared_ptr<const SpectralBasis> basis, std::size_t s) {
  if (s < 1 || s > basis->size())
    throw std::out_of_range("weak_instance: s=" + std::to_string(s) + " outside 1.." +
                            std::to_string(basis->size()));
  std::vector<cplx> c(s);
  for (std::size_t k = 1; k < s; ++k) {
    const double a = basis->sigma(k);
    const double b = basis->sigma(k + 1);
    c[k - 1] = std::sqrt((a - b) * (a + b));
  }
  c[s - 1] = basis->sigma(s);
  return {std::move(basis), std::move(c)};
}

CoefficientFunction random_unit_ball(std::shared_ptr<const SpectralBasis> basis, std::size_t s,
                                     RngStream& rng) {
  if (s < 1 || s > basis->size())
    throw std::out_of_range("random_unit_ball: s=" + std::to_string(s) + " outside 1.." +
                            std::to_string(basis->size()));
  std::vector<cplx> c(s);
  double norm2 = 0.0;
  while (norm2 == 0.0) {
    for (auto& v : c) {
      const double re = rng.normal();
      const double im = rng.normal();
      v = {re, im};
    }
    norm2 = 0.0;
    for (const auto& v : c) norm2 += std::norm(v);
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (std::size_t j = 0; j < s; ++j) c[j] *= scale * basis->sigma(j + 1);
  return {std::move(basis), std::move(c)};
}

void write_coefficients_csv(std::ostream& out, const CoefficientFunction& f) {
  out << "# " << f.basis().spec().describe() << " N=" << f.basis().size() << '\n';
  out << "j,re,im\n";
  const auto c = f.coeffs();
  for (std::size_t j = 0; j < c.size(); ++j)
    out << j + 1 << ',' << format_double(c[j].real()) << ',' << format_double(c[j].imag()) << '\n';
}

CoefficientFunction read_coefficients_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw std::invalid_argument("coefficient CSV: missing '# spec=...' header line");
  const auto fields = parse_fields(std::string_view(line).substr(2));
  const WeightSpec spec = parse_weight_spec(fields);
  const auto n_it = fields.find("N");
  if (n_it == fields.end()) throw std::invalid_argument("coefficient CSV: header lacks N=");
  auto basis = enumerate_basis(spec, parse_uint(n_it->second));

  if (!std::getline(in, line) || trim(line) != "j,re,im")
    throw std::invalid_argument("coefficient CSV: expected column header 'j,re,im'");
  std::vector<cplx> coeffs;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cols = split(t, ',');
    if (cols.size() != 3)
      throw std::invalid_argument("coefficient CSV line " + std::to_string(lineno) + ": expected 3 columns");
    const auto j = parse_uint(cols[0]);
    if (j != coeffs.size() + 1)
      throw std::invalid_argument("coefficient CSV line " + std::to_string(lineno) +
                                  ": indices must run 1, 2, 3, ...");
    coeffs.emplace_back(parse_double(cols[1]), parse_double(cols[2]));
  }
  return {std::move(basis), std::move(coeffs)};
}

}  // namespace mlapprox
