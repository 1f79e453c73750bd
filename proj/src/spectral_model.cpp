#include "mlapprox/spectral_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

#include "mlapprox/csv.hpp"

namespace mlapprox {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const char* kind_name(WeightKind kind) {
  switch (kind) {
    case WeightKind::MixedSobolev: return "mixed";
    case WeightKind::IsotropicSobolev: return "isotropic";
    case WeightKind::TensorProduct: return "tensor";
    case WeightKind::ExplicitSigma: return "explicit";
  }
  return "?";
}

std::string join_sigma(const std::vector<double>& sigma) {
  std::string out;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (i) out += ',';
    out += format_double(sigma[i]);
  }
  return out;
}

double squared_derivative_factor(int k, bool angular) {
  const double a = angular ? kTwoPi * static_cast<double>(k) : static_cast<double>(k);
  return a * a;
}

// sum_{a=0}^r t^a, accumulated from the smallest term up.
double power_sum(double t, int r) {
  double term = 1.0;
  double sum = 1.0;
  for (int a = 1; a <= r; ++a) {
    term *= t;
    sum += term;
  }
  return sum;
}

std::vector<int> sorted_abs(const FrequencyVector& k) {
  std::vector<int> a;
  a.reserve(k.size());
  for (int v : k)
    if (v != 0) a.push_back(std::abs(v));
  std::sort(a.begin(), a.end());
  return a;
}

// Coordinates are visited in ascending |k_c| so that weights of permuted or
// reflected frequencies are bit-identical and ties stay ties.
double mixed_weight(int r, bool angular, const FrequencyVector& k) {
  double w = 1.0;
  for (int a : sorted_abs(k)) w *= std::sqrt(power_sum(squared_derivative_factor(a, angular), r));
  return w;
}

// Sum over multi-indices with |alpha|_1 <= r of prod t_c^alpha_c, as the
// truncated product of univariate polynomials in an auxiliary variable.
double isotropic_weight(int r, bool angular, const FrequencyVector& k) {
  std::vector<double> poly(static_cast<std::size_t>(r) + 1, 0.0);
  poly[0] = 1.0;
  std::vector<double> next(poly.size());
  for (int a : sorted_abs(k)) {
    const double t = squared_derivative_factor(a, angular);
    std::fill(next.begin(), next.end(), 0.0);
    for (int deg = 0; deg <= r; ++deg) {
      if (poly[deg] == 0.0) continue;
      double term = poly[deg];
      for (int e = 0; deg + e <= r; ++e) {
        next[deg + e] += term;
        term *= t;
      }
    }
    poly.swap(next);
  }
  double sum = 0.0;
  for (double c : poly) sum += c;
  return std::sqrt(sum);
}

// Position of a univariate frequency in the order 0, -1, 1, -2, 2, ...
std::size_t univariate_position(int k) {
  if (k == 0) return 0;
  return k < 0 ? 2 * static_cast<std::size_t>(-k) - 1 : 2 * static_cast<std::size_t>(k);
}

struct Candidate {
  double weight;
  long l1;
  FrequencyVector k;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.weight != b.weight) return a.weight < b.weight;
  if (a.l1 != b.l1) return a.l1 < b.l1;
  return a.k < b.k;
}

long l1_norm(const FrequencyVector& k) {
  long s = 0;
  for (int v : k) s += std::abs(v);
  return s;
}

// Best-first expansion from 0: every move steps one coordinate away from zero,
// which never decreases the weight and strictly increases |k|_1, so the key
// strictly increases along every path and pop order is the sorted order.
std::vector<Candidate> best_first(const WeightSpec& spec, std::size_t count) {
  auto greater = [](const Candidate& a, const Candidate& b) { return candidate_less(b, a); };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(greater)> frontier(greater);
  std::set<FrequencyVector> seen;

  FrequencyVector origin(static_cast<std::size_t>(spec.d), 0);
  const double w0 = weight(spec, origin);
  if (std::isfinite(w0)) {
    frontier.push({w0, 0, origin});
    seen.insert(origin);
  }

  std::vector<Candidate> out;
  out.reserve(count);
  while (out.size() < count && !frontier.empty()) {
    Candidate top = frontier.top();
    frontier.pop();
    for (std::size_t c = 0; c < top.k.size(); ++c) {
      const int kc = top.k[c];
      int steps[2];
      int nsteps = 0;
      if (kc == 0) {
        steps[nsteps++] = -1;
        steps[nsteps++] = 1;
      } else {
        steps[nsteps++] = kc < 0 ? kc - 1 : kc + 1;
      }
      for (int s = 0; s < nsteps; ++s) {
        FrequencyVector next = top.k;
        next[c] = steps[s];
        if (!seen.insert(next).second) continue;
        const double w = weight(spec, next);
        if (!std::isfinite(w)) continue;
        frontier.push({w, l1_norm(next), std::move(next)});
      }
    }
    out.push_back(std::move(top));
  }
  return out;
}

// Frequencies assigned to the entries of a Fourier-backed ExplicitSigma model.
std::vector<FrequencyVector> canonical_frequencies(int d, std::size_t count) {
  std::vector<FrequencyVector> freqs;
  for (auto& c : best_first(WeightSpec::mixed(1, d, false), count)) freqs.push_back(std::move(c.k));
  return freqs;
}

}  // namespace

WeightSpec WeightSpec::mixed(int r, int d, bool angular) {
  WeightSpec s;
  s.kind = WeightKind::MixedSobolev;
  s.r = r;
  s.d = d;
  s.angular = angular;
  s.validate();
  return s;
}

WeightSpec WeightSpec::isotropic(int r, int d, bool angular) {
  WeightSpec s = mixed(r, d, angular);
  s.kind = WeightKind::IsotropicSobolev;
  return s;
}

WeightSpec WeightSpec::tensor(std::vector<WeightSpec> factors) {
  WeightSpec s;
  s.kind = WeightKind::TensorProduct;
  s.r = 0;
  s.d = static_cast<int>(factors.size());
  s.factors = std::move(factors);
  s.validate();
  return s;
}

WeightSpec WeightSpec::explicit_sigma(std::vector<double> sigma, int d) {
  return explicit_sigma(std::move(sigma), d, nullptr);
}

WeightSpec WeightSpec::explicit_sigma(std::vector<double> sigma, int d,
                                      std::shared_ptr<const CustomSystem> system) {
  WeightSpec s;
  s.kind = WeightKind::ExplicitSigma;
  s.r = 0;
  s.d = d;
  s.sigma = std::move(sigma);
  s.system = std::move(system);
  s.validate();
  return s;
}

void WeightSpec::validate() const {
  if (d < 1) throw std::invalid_argument("WeightSpec: dimension d must be >= 1");
  if (kind != WeightKind::ExplicitSigma && system)
    throw std::invalid_argument("WeightSpec: custom systems require an ExplicitSigma model");
  switch (kind) {
    case WeightKind::MixedSobolev:
    case WeightKind::IsotropicSobolev:
      if (r < 0) throw std::invalid_argument("WeightSpec: smoothness r must be >= 0");
      break;
    case WeightKind::TensorProduct:
      if (factors.empty()) throw std::invalid_argument("WeightSpec: tensor product needs factors");
      if (static_cast<std::size_t>(d) != factors.size())
        throw std::invalid_argument("WeightSpec: tensor dimension must equal the factor count");
      for (const auto& f : factors) {
        if (f.kind == WeightKind::TensorProduct || f.d != 1 || f.system)
          throw std::invalid_argument("WeightSpec: tensor factors must be univariate Fourier models");
        f.validate();
      }
      break;
    case WeightKind::ExplicitSigma:
      if (sigma.empty()) throw std::invalid_argument("WeightSpec: explicit sigma sequence is empty");
      for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i]))
          throw std::invalid_argument("WeightSpec: explicit sigma values must be positive");
        if (i > 0 && sigma[i] > sigma[i - 1])
          throw std::invalid_argument("WeightSpec: explicit sigma sequence must be nonincreasing");
      }
      if (system && !system->evaluate)
        throw std::invalid_argument("WeightSpec: custom system has no evaluator");
      if (system && !(system->sup_abs_sq > 0.0))
        throw std::invalid_argument("WeightSpec: custom system bound must be positive");
      break;
  }
}

std::string WeightSpec::describe() const {
  std::string out = std::string("spec=") + kind_name(kind);
  switch (kind) {
    case WeightKind::MixedSobolev:
    case WeightKind::IsotropicSobolev:
      out += " r=" + std::to_string(r) + " d=" + std::to_string(d) + " angular=" + format_bool(angular);
      break;
    case WeightKind::TensorProduct: {
      out += " d=" + std::to_string(d) + " factors=";
      for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& f = factors[i];
        if (i) out += ';';
        out += kind_name(f.kind);
        if (f.kind == WeightKind::ExplicitSigma)
          out += ":" + join_sigma(f.sigma);
        else
          out += ":" + std::to_string(f.r) + ":" + format_bool(f.angular);
      }
      break;
    }
    case WeightKind::ExplicitSigma:
      out += " d=" + std::to_string(d) + " sigma=" + join_sigma(sigma);
      if (system) out += " system=custom";
      break;
  }
  return out;
}

double weight(const WeightSpec& spec, const FrequencyVector& k) {
  if (k.size() != static_cast<std::size_t>(spec.d))
    throw std::invalid_argument("weight: frequency length " + std::to_string(k.size()) +
                                " does not match dimension " + std::to_string(spec.d));
  switch (spec.kind) {
    case WeightKind::MixedSobolev: return mixed_weight(spec.r, spec.angular, k);
    case WeightKind::IsotropicSobolev: return isotropic_weight(spec.r, spec.angular, k);
    case WeightKind::TensorProduct: {
      double w = 1.0;
      for (std::size_t c = 0; c < k.size(); ++c) w *= weight(spec.factors[c], FrequencyVector{k[c]});
      return w;
    }
    case WeightKind::ExplicitSigma: {
      std::size_t pos = spec.sigma.size();
      if (spec.d == 1) {
        pos = univariate_position(k[0]);
      } else {
        const auto freqs = canonical_frequencies(spec.d, spec.sigma.size());
        pos = static_cast<std::size_t>(std::find(freqs.begin(), freqs.end(), k) - freqs.begin());
      }
      if (pos >= spec.sigma.size()) return std::numeric_limits<double>::infinity();
      return 1.0 / spec.sigma[pos];
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SpectralBasis::SpectralBasis(WeightSpec spec, std::vector<FrequencyVector> frequencies,
                             std::vector<double> sigma)
    : spec_(std::move(spec)), frequencies_(std::move(frequencies)), sigma_(std::move(sigma)) {
  spec_.validate();
  if (sigma_.empty()) throw std::invalid_argument("SpectralBasis: empty basis");
  if (is_fourier() && frequencies_.size() != sigma_.size())
    throw std::invalid_argument("SpectralBasis: frequency and sigma counts differ");
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (!(sigma_[i] > 0.0)) throw std::invalid_argument("SpectralBasis: sigma must be positive");
    if (i > 0 && sigma_[i] > sigma_[i - 1])
      throw std::invalid_argument("SpectralBasis: sigma must be nonincreasing");
  }
  const auto d = static_cast<std::size_t>(spec_.d);
  flat_.reserve(frequencies_.size() * d);
  prefix_max_.reserve(frequencies_.size() * d);
  for (std::size_t i = 0; i < frequencies_.size(); ++i) {
    const auto& k = frequencies_[i];
    if (k.size() != d) throw std::invalid_argument("SpectralBasis: frequency dimension mismatch");
    bool zero = true;
    for (std::size_t c = 0; c < d; ++c) {
      flat_.push_back(k[c]);
      const int prev = i ? prefix_max_[(i - 1) * d + c] : 0;
      prefix_max_.push_back(std::max(prev, std::abs(k[c])));
      zero = zero && k[c] == 0;
    }
    if (zero && zero_index_ == 0) zero_index_ = i + 1;
  }
}

double SpectralBasis::sigma(std::size_t j) const {
  if (j < 1 || j > sigma_.size())
    throw std::out_of_range("sigma: index " + std::to_string(j) + " outside 1.." +
                            std::to_string(sigma_.size()));
  return sigma_[j - 1];
}

const FrequencyVector& SpectralBasis::frequency(std::size_t j) const {
  if (j < 1 || j > frequencies_.size())
    throw std::out_of_range("frequency: index " + std::to_string(j) + " out of range");
  return frequencies_[j - 1];
}

int SpectralBasis::max_abs_frequency(std::size_t m, int coordinate) const {
  if (m == 0) return 0;
  return prefix_max_[(m - 1) * static_cast<std::size_t>(spec_.d) + static_cast<std::size_t>(coordinate)];
}

std::shared_ptr<const SpectralBasis> enumerate_basis(const WeightSpec& spec, std::size_t N) {
  spec.validate();
  if (N < 1) throw std::invalid_argument("enumerate_basis: N must be >= 1");
  if (spec.kind == WeightKind::ExplicitSigma) {
    const std::size_t count = std::min(N, spec.sigma.size());
    std::vector<double> sigma(spec.sigma.begin(), spec.sigma.begin() + static_cast<long>(count));
    std::vector<FrequencyVector> freqs;
    if (!spec.system) freqs = canonical_frequencies(spec.d, count);
    return std::make_shared<const SpectralBasis>(spec, std::move(freqs), std::move(sigma));
  }
  std::vector<FrequencyVector> freqs;
  std::vector<double> sigma;
  for (auto& c : best_first(spec, N)) {
    sigma.push_back(1.0 / c.weight);
    freqs.push_back(std::move(c.k));
  }
  return std::make_shared<const SpectralBasis>(spec, std::move(freqs), std::move(sigma));
}

cplx evaluate_basis(const SpectralBasis& basis, std::size_t j, std::span<const double> x) {
  if (j < 1 || j > basis.size())
    throw std::out_of_range("evaluate_basis: index " + std::to_string(j) + " out of range");
  if (x.size() != static_cast<std::size_t>(basis.dimension()))
    throw std::invalid_argument("evaluate_basis: point dimension mismatch");
  if (const auto* sys = basis.custom_system()) return sys->evaluate(j, x);
  const auto& k = basis.frequency(j);
  double phase = 0.0;
  for (std::size_t c = 0; c < k.size(); ++c) phase += static_cast<double>(k[c]) * x[c];
  phase -= std::floor(phase);
  return std::polar(1.0, kTwoPi * phase);
}

double density_u_m(const SpectralBasis& basis, std::size_t m, std::span<const double> x) {
  if (m < 1 || m > basis.size())
    throw std::out_of_range("density_u_m: m=" + std::to_string(m) + " outside 1.." +
                            std::to_string(basis.size()));
  if (basis.is_fourier()) return 1.0;
  double sum = 0.0;
  for (std::size_t j = 1; j <= m; ++j) sum += std::norm(evaluate_basis(basis, j, x));
  return sum / static_cast<double>(m);
}

double preasymptotic_exponent(double r, int d) {
  if (!(r > 0.0)) throw std::invalid_argument("preasymptotic_exponent: r must be positive");
  if (d < 1) throw std::invalid_argument("preasymptotic_exponent: d must be >= 1");
  return r / (2.0 + std::log(static_cast<double>(d)));
}

BasisEvaluator::BasisEvaluator(const SpectralBasis& basis)
    : basis_(&basis), offsets_(static_cast<std::size_t>(basis.dimension()) + 1, 0) {}

std::span<const cplx> BasisEvaluator::evaluate(std::span<const double> x, std::size_t m) {
  const auto& basis = *basis_;
  if (m > basis.size()) throw std::out_of_range("BasisEvaluator: m exceeds basis size");
  if (x.size() != static_cast<std::size_t>(basis.dimension()))
    throw std::invalid_argument("BasisEvaluator: point dimension mismatch");
  values_.resize(m);
  if (const auto* sys = basis.custom_system()) {
    for (std::size_t j = 0; j < m; ++j) values_[j] = sys->evaluate(j + 1, x);
    return values_;
  }

  // powers_[offsets_[c] + a] = exp(2*pi*i*a*x_c), re-anchored every 32 steps.
  constexpr int kAnchor = 32;
  const int d = basis.dimension();
  for (int c = 0; c < d; ++c)
    offsets_[c + 1] = offsets_[c] + static_cast<std::size_t>(basis.max_abs_frequency(m, c)) + 1;
  powers_.resize(offsets_[d]);
  for (int c = 0; c < d; ++c) {
    const int kmax = basis.max_abs_frequency(m, c);
    cplx* p = powers_.data() + offsets_[c];
    p[0] = 1.0;
    if (kmax == 0) continue;
    const double xc = x[c] - std::floor(x[c]);
    const cplx step = std::polar(1.0, kTwoPi * xc);
    for (int a = 1; a <= kmax; ++a) {
      if (a % kAnchor == 0) {
        double phase = static_cast<double>(a) * xc;
        phase -= std::floor(phase);
        p[a] = std::polar(1.0, kTwoPi * phase);
      } else {
        p[a] = p[a - 1] * step;
      }
    }
  }

  const int* k = basis.frequency_data();
  for (std::size_t j = 0; j < m; ++j, k += d) {
    cplx v = 1.0;
    for (int c = 0; c < d; ++c) {
      const int kc = k[c];
      if (kc == 0) continue;
      const cplx p = powers_[offsets_[c] + static_cast<std::size_t>(std::abs(kc))];
      v *= kc < 0 ? std::conj(p) : p;
    }
    values_[j] = v;
  }
  return values_;
}

void write_basis_csv(std::ostream& out, const SpectralBasis& basis) {
  out << "j";
  if (basis.has_frequencies())
    for (int c = 1; c <= basis.dimension(); ++c) out << ",k_" << c;
  out << ",sigma\n";
  for (std::size_t j = 1; j <= basis.size(); ++j) {
    out << j;
    if (basis.has_frequencies())
      for (int v : basis.frequency(j)) out << ',' << v;
    out << ',' << format_double(basis.sigma(j)) << '\n';
  }
}


namespace {

[[noreturn]] void bad_field(const std::string& key, const std::string& what) {
  throw std::invalid_argument("field '" + key + "': " + what);
}

template <typename Fn>
auto field_value(const std::map<std::string, std::string>& fields, const std::string& key, Fn parse)
    -> decltype(parse(std::string_view{})) {
  try {
    return parse(fields.at(key));
  } catch (const std::out_of_range&) {
    bad_field(key, "missing");
  } catch (const std::invalid_argument& e) {
    bad_field(key, e.what());
  }
}

std::vector<double> parse_sigma_list(std::string_view s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(part));
  return out;
}

int parse_small_int(std::string_view s) {
  const auto v = parse_int(s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw std::invalid_argument("integer out of range");
  return static_cast<int>(v);
}

WeightSpec parse_factor(const std::string& token) {
  const auto parts = split(token, ':');
  if (parts[0] == "explicit") {
    if (parts.size() != 2) throw std::invalid_argument("explicit factor needs 'explicit:<s1>,<s2>,...'");
    return WeightSpec::explicit_sigma(parse_sigma_list(parts[1]), 1);
  }
  if (parts.size() < 2 || parts.size() > 3)
    throw std::invalid_argument("factor '" + token + "' must read '<kind>:<r>[:<angular>]'");
  const int r = parse_small_int(parts[1]);
  const bool angular = parts.size() == 3 ? parse_bool(parts[2]) : true;
  if (parts[0] == "mixed") return WeightSpec::mixed(r, 1, angular);
  if (parts[0] == "isotropic") return WeightSpec::isotropic(r, 1, angular);
  throw std::invalid_argument("unknown factor kind '" + parts[0] + "'");
}

}  // namespace

std::map<std::string, std::string> parse_fields(std::string_view line) {
  std::map<std::string, std::string> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(" \t\r\n", pos);
    if (start == std::string_view::npos) break;
    auto end = line.find_first_of(" \t\r\n", start);
    if (end == std::string_view::npos) end = line.size();
    const auto token = line.substr(start, end - start);
    const auto eq = token.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("expected key=value, got '" + std::string(token) + "'");
    fields[std::string(token.substr(0, eq))] = std::string(token.substr(eq + 1));
    pos = end;
  }
  return fields;
}

WeightSpec parse_weight_spec(const std::map<std::string, std::string>& fields) {
  const auto kind = field_value(fields, "spec", [](std::string_view s) { return std::string(trim(s)); });
  auto optional_int = [&](const std::string& key, int fallback) {
    return fields.count(key) ? field_value(fields, key, parse_small_int) : fallback;
  };
  const int d = optional_int("d", 1);
  const bool angular = fields.count("angular") ? field_value(fields, "angular", parse_bool) : true;
  try {
    if (kind == "mixed") return WeightSpec::mixed(optional_int("r", 1), d, angular);
    if (kind == "isotropic") return WeightSpec::isotropic(optional_int("r", 1), d, angular);
    if (kind == "explicit") {
      if (fields.count("system")) bad_field("system", "custom systems cannot be loaded from text");
      return WeightSpec::explicit_sigma(field_value(fields, "sigma", parse_sigma_list), d);
    }
    if (kind == "tensor") {
      std::vector<WeightSpec> factors;
      const auto tokens = field_value(fields, "factors", [](std::string_view s) { return split(s, ';'); });
      for (const auto& t : tokens) {
        try {
          factors.push_back(parse_factor(t));
        } catch (const std::invalid_argument& e) {
          bad_field("factors", e.what());
        }
      }
      if (fields.count("d") && static_cast<std::size_t>(d) != factors.size())
        bad_field("d", "does not match the number of factors");
      return WeightSpec::tensor(std::move(factors));
    }
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.rfind("field '", 0) == 0) throw;
    bad_field("spec", msg);
  }
  bad_field("spec", "unknown kind '" + kind + "' (expected mixed, isotropic, tensor or explicit)");
}

}  // namespace mlapprox
