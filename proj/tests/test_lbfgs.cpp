#include <cmath>
#include <limits>

#include "doctest.h"
#include "reflines/lbfgs.hpp"

using namespace reflines;

namespace {

double quadratic(std::span<const double> x, std::span<double> g) {
  // sum_i (i+1) (x_i - i)^2
  double f = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - static_cast<double>(i);
    f += static_cast<double>(i + 1) * d * d;
    g[i] = 2.0 * static_cast<double>(i + 1) * d;
  }
  return f;
}

double rosenbrock(std::span<const double> x, std::span<double> g) {
  const double a = 1 - x[0], b = x[1] - x[0] * x[0];
  g[0] = -2 * a - 400 * x[0] * b;
  g[1] = 200 * b;
  return a * a + 100 * b * b;
}

void check_non_increasing(const LbfgsResult& r) {
  double prev = r.initial_value;
  for (double v : r.value_trace) {
    CHECK(v <= prev);
    prev = v;
  }
}

}  // namespace

TEST_CASE("minimizes a separable quadratic") {
  std::vector<double> x(6, 0.0);
  LbfgsOptions opt;
  opt.tolerance = 1e-14;
  const auto r = lbfgs_minimize(quadratic, x, opt);
  CHECK(r.converged);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(i).epsilon(1e-6));
  CHECK(static_cast<int>(r.value_trace.size()) == r.iterations);
  CHECK(r.grad_norm_trace.size() == r.value_trace.size());
  check_non_increasing(r);
}

TEST_CASE("minimizes the Rosenbrock function") {
  std::vector<double> x = {-1.2, 1.0};
  LbfgsOptions opt;
  opt.tolerance = 1e-15;
  opt.max_iterations = 500;
  const auto r = lbfgs_minimize(rosenbrock, x, opt);
  CHECK(std::abs(x[0] - 1.0) < 1e-4);
  CHECK(std::abs(x[1] - 1.0) < 1e-4);
  check_non_increasing(r);
}

TEST_CASE("stopping conditions") {
  SUBCASE("iteration cap") {
    std::vector<double> x = {-1.2, 1.0};
    LbfgsOptions opt;
    opt.max_iterations = 1;
    const auto r = lbfgs_minimize(rosenbrock, x, opt);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.stop_reason == "maximum iterations reached");
  }
  SUBCASE("already optimal") {
    std::vector<double> x = {1.0, 1.0};
    const auto r = lbfgs_minimize(rosenbrock, x, {});
    CHECK(r.converged);
    CHECK(r.iterations == 0);
  }
  SUBCASE("non-finite start") {
    std::vector<double> x = {0.0};
    const auto r = lbfgs_minimize(
        [](std::span<const double>, std::span<double> g) {
          g[0] = 0;
          return std::numeric_limits<double>::quiet_NaN();
        },
        x, {});
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 0);
  }
  SUBCASE("infinite trial points shrink the step") {
    // f = x^2 - 2x on x < 3, +inf beyond.
    std::vector<double> x = {0.0};
    LbfgsOptions opt;
    opt.tolerance = 1e-14;
    const auto r = lbfgs_minimize(
        [](std::span<const double> v, std::span<double> g) {
          g[0] = 2 * v[0] - 2;
          return v[0] >= 3 ? std::numeric_limits<double>::infinity() : v[0] * v[0] - 2 * v[0];
        },
        x, opt);
    CHECK(x[0] == doctest::Approx(1.0));
    check_non_increasing(r);
  }
}
