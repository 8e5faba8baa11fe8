#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace polpair {

/// Options for the quasi-Newton descent below. Convergence is declared when
/// the objective improves by less than `min_improvement` over a sliding
/// window of `window` iterations.
struct MinimizeOptions {
  int max_iterations = 2000;
  int window = 25;
  double min_improvement = 1e-10;
  double gradient_step = 1e-5;
  /// Optional sink for the objective value after every accepted step.
  std::vector<double>* accepted_trace = nullptr;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

/// BFGS with central-difference numerical gradients and Armijo backtracking.
/// Accepted steps never increase the objective.
MinimizeResult minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& x0, const MinimizeOptions& opts = {});

} // namespace polpair
