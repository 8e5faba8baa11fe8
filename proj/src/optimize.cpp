#include "polpair/optimize.hpp"

#include <cmath>
#include <deque>

namespace polpair {

namespace {

Eigen::VectorXd numerical_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double rel_step, long& evals) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    const double xi = x(i);
    xp(i) = xi + h;
    const double fp = f(xp);
    xp(i) = xi - h;
    const double fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
    evals += 2;
  }
  return g;
}

} // namespace

MinimizeResult minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& x0, const MinimizeOptions& opts) {
  const Eigen::Index n = x0.size();
  MinimizeResult res;
  res.x = x0;
  res.value = f(x0);
  res.evaluations = 1;

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd grad = numerical_gradient(f, res.x, opts.gradient_step, res.evaluations);
  std::deque<double> history;
  history.push_back(res.value);

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    res.iterations = iter + 1;
    Eigen::VectorXd dir = -(h_inv * grad);
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      // Bad curvature estimate; restart from steepest descent.
      h_inv.setIdentity();
      dir = -grad;
      slope = grad.dot(dir);
      if (!(slope < 0.0)) break; // gradient numerically zero
    }

    // Armijo backtracking.
    double step = 1.0;
    double new_value = res.value;
    Eigen::VectorXd x_new = res.x;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = res.x + step * dir;
      new_value = f(x_new);
      ++res.evaluations;
      if (new_value <= res.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Eigen::VectorXd grad_new =
        numerical_gradient(f, x_new, opts.gradient_step, res.evaluations);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::VectorXd hy = h_inv * y;
      const double yhy = y.dot(hy);
      h_inv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
               (hy * s.transpose() + s * hy.transpose()) / sy;
    }

    res.x = x_new;
    res.value = new_value;
    grad = grad_new;
    if (opts.accepted_trace) opts.accepted_trace->push_back(res.value);

    history.push_back(res.value);
    if (static_cast<int>(history.size()) > opts.window + 1) history.pop_front();
    if (static_cast<int>(history.size()) == opts.window + 1 &&
        history.front() - history.back() < opts.min_improvement) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged && res.iterations < opts.max_iterations) {
    // Line search or gradient stalled at numerical precision: treat a stall
    // with no possible progress as convergence.
    res.converged = true;
  }
  return res;
}

} // namespace polpair
