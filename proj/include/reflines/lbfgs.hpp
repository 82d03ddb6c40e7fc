#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace reflines {

struct LbfgsOptions {
  int max_iterations = 200;
  double tolerance = 1e-6;  // relative objective change
  int history = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_evaluations_per_search = 40;
};

struct LbfgsResult {
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  double value = 0;                  // final f
  double initial_value = 0;
  std::vector<double> value_trace;   // f after each accepted iteration
  std::vector<double> grad_norm_trace;
  int evaluations = 0;
};

/// Objective callback: returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Minimises `f` from `x` (updated in place) with limited-memory BFGS and a
/// strong-Wolfe line search. Accepted steps always satisfy the sufficient
/// decrease condition, so the value trace is non-increasing.
LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double>& x,
                           const LbfgsOptions& options);

}  // namespace reflines
