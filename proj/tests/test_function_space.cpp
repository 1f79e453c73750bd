#include "mlapprox/function_space.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "mlapprox/sampling.hpp"

namespace mlapprox {
namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

std::shared_ptr<const SpectralBasis> mixed_1d(std::size_t N = 16) { return enumerate_basis(WeightSpec::mixed(1, 1), N); }

CoefficientFunction b1_plus_b2(std::shared_ptr<const SpectralBasis> basis) {
  return {std::move(basis), {kInvSqrt2, kInvSqrt2}};
}

TEST(Evaluate, Examples) {
  const auto basis = mixed_1d();
  const std::vector<double> x{0.37};
  EXPECT_EQ(evaluate(CoefficientFunction(basis, {1.0}), x), cplx(1.0));
  EXPECT_EQ(evaluate(CoefficientFunction(basis), x), cplx(0.0));
  const cplx expected = (1.0 + std::exp(cplx(0.0, -2.0 * std::numbers::pi * 0.37))) * kInvSqrt2;
  EXPECT_NEAR(std::abs(evaluate(b1_plus_b2(basis), x) - expected), 0.0, 1e-15);
}

TEST(Evaluate, Linear) {
  const auto basis = enumerate_basis(WeightSpec::mixed(1, 2), 40);
  RngStream rng(3, 0);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_unit_ball(basis, 40, rng);
    const auto g = random_unit_ball(basis, 25, rng);
    const cplx a(rng.normal(), rng.normal());
    const cplx b(rng.normal(), rng.normal());
    const std::vector<double> x{rng.uniform(), rng.uniform()};
    const cplx lhs = evaluate(f * a + g * b, x);
    const cplx rhs = a * evaluate(f, x) + b * evaluate(g, x);
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
  }
}

TEST(Norms, Examples) {
  const auto basis = mixed_1d();
  EXPECT_NEAR(f_norm(CoefficientFunction(basis, {0, 0, 0, 0, basis->sigma(5)})), 1.0, 1e-15);
  EXPECT_NEAR(l2_norm(b1_plus_b2(basis)), 1.0, 1e-15);
  const auto explicit_basis = enumerate_basis(WeightSpec::explicit_sigma({1.0, 0.5}), 2);
  EXPECT_NEAR(f_norm(CoefficientFunction(explicit_basis, {1.0, 1.0})), std::sqrt(5.0), 1e-15);
}

TEST(Project, Examples) {
  const auto basis = mixed_1d();
  const auto f = b1_plus_b2(basis);
  EXPECT_EQ(l2_norm(project(f, 0)), 0.0);
  EXPECT_EQ(exact_l2_error(project(f, 5), f), 0.0);
  EXPECT_NEAR(exact_l2_error(f, project(f, 1)), kInvSqrt2, 1e-15);
  EXPECT_THROW(project(f, 17), std::out_of_range);
}

TEST(ExactL2Error, Examples) {
  const auto basis = mixed_1d();
  const auto f = b1_plus_b2(basis);
  const CoefficientFunction b1(basis, {1.0});
  EXPECT_EQ(exact_l2_error(f, f), 0.0);
  EXPECT_EQ(exact_l2_error(b1, CoefficientFunction(basis)), 1.0);
  const double d1 = 1.0 - kInvSqrt2;
  EXPECT_NEAR(exact_l2_error(f, b1), std::sqrt(d1 * d1 + 0.5), 1e-15);
}

TEST(ExactL2Error, BasisMismatchThrows) {
  const CoefficientFunction f(mixed_1d(), {1.0});
  const CoefficientFunction g(enumerate_basis(WeightSpec::mixed(2, 1), 16), {1.0});
  EXPECT_THROW(exact_l2_error(f, g), std::invalid_argument);
  // Separately enumerated copies of the same basis are compatible.
  EXPECT_EQ(exact_l2_error(f, CoefficientFunction(mixed_1d(), {1.0})), 0.0);
}

TEST(ExactL2Error, ParsevalConsistency) {
  const auto basis = enumerate_basis(WeightSpec::mixed(1, 2), 64);
  RngStream rng(11, 0);
  for (int t = 0; t < 1000; ++t) {
    const auto f = random_unit_ball(basis, 1 + rng.uniform_index(64), rng);
    ASSERT_NEAR(exact_l2_error(f, CoefficientFunction(basis)), l2_norm(f), 1e-15);
  }
}

TEST(HardInstance, Examples) {
  const auto explicit_basis = enumerate_basis(WeightSpec::explicit_sigma({1.0, 0.5}), 2);
  const auto h = hard_instance(explicit_basis, 1);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.coefficient(1), cplx(0.0));
  EXPECT_EQ(h.coefficient(2), cplx(0.5));

  const auto basis = mixed_1d();
  const auto h1 = hard_instance(basis, 1);
  EXPECT_NEAR(std::abs(h1.coefficient(2)), 0.15718, 1e-5);
  const auto h0 = hard_instance(basis, 0);
  EXPECT_EQ(h0.coefficient(1), cplx(1.0));
  EXPECT_THROW(hard_instance(basis, 16), std::out_of_range);
}

TEST(HardInstance, UnitFNorm) {
  const auto basis = enumerate_basis(WeightSpec::isotropic(2, 2), 200);
  for (std::size_t m = 0; m < basis->size(); ++m) ASSERT_NEAR(f_norm(hard_instance(basis, m)), 1.0, 1e-12);
}

TEST(WeakInstance, Examples) {
  const auto basis = enumerate_basis(WeightSpec::explicit_sigma({1.0, 0.5, 1.0 / 3.0}), 3);
  const auto f = weak_instance(basis, 2);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_NEAR(f.coefficient(1).real(), std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_NEAR(f.coefficient(2).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::pow(exact_l2_error(f, project(f, 1)), 2), 0.25, 1e-15);
  const auto one = weak_instance(basis, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.coefficient(1), cplx(1.0));
}

TEST(WeakInstance, TailsEqualNextSigmaSquared) {
  for (const auto& spec : {WeightSpec::mixed(1, 1), WeightSpec::mixed(1, 2, false)}) {
    const auto basis = enumerate_basis(spec, 300);
    const auto f = weak_instance(basis, 300);
    EXPECT_NEAR(l2_norm(f), basis->sigma(1), 1e-12);
    for (std::size_t m = 0; m < 300; ++m) {
      const double tail = exact_l2_error_squared(f, project(f, m));
      const double s = basis->sigma(m + 1);
      ASSERT_NEAR(tail, s * s, 1e-12 * std::max(1.0, s * s)) << "m=" << m;
    }
  }
}

TEST(RandomUnitBall, UnitFNormAndDeterminism) {
  const auto basis = enumerate_basis(WeightSpec::mixed(2, 2), 100);
  RngStream a(5, 9), b(5, 9);
  for (int t = 0; t < 50; ++t) {
    const auto f = random_unit_ball(basis, 100, a);
    const auto g = random_unit_ball(basis, 100, b);
    ASSERT_NEAR(f_norm(f), 1.0, 1e-12);
    for (std::size_t j = 1; j <= 100; ++j) ASSERT_EQ(f.coefficient(j), g.coefficient(j));
  }
  RngStream c(1, 1);
  const auto one = random_unit_ball(basis, 1, c);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(std::abs(one.coefficient(1)), basis->sigma(1), 1e-15);
}

TEST(CoefficientCsv, RoundTrip) {
  const auto basis = enumerate_basis(WeightSpec::tensor({WeightSpec::mixed(1, 1), WeightSpec::mixed(2, 1, false)}), 30);
  RngStream rng(2, 2);
  const auto f = random_unit_ball(basis, 30, rng);
  std::stringstream io;
  write_coefficients_csv(io, f);
  const auto g = read_coefficients_csv(io);
  EXPECT_EQ(g.basis().spec().describe(), basis->spec().describe());
  EXPECT_EQ(exact_l2_error(f, g), 0.0);
}

TEST(CoefficientCsv, MalformedInputThrows) {
  std::istringstream missing_header("j,re,im\n1,1,0\n");
  EXPECT_THROW(read_coefficients_csv(missing_header), std::invalid_argument);
  std::istringstream bad_row("# spec=mixed r=1 d=1 angular=true N=4\nj,re,im\n1,abc,0\n");
  EXPECT_THROW(read_coefficients_csv(bad_row), std::invalid_argument);
}

}  // namespace
}  // namespace mlapprox
