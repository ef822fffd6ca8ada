#pragma once

#include <functional>

#include <Eigen/Dense>

namespace eecm {

struct NewtonOptions {
    int max_iterations = 50;
    double residual_tol = 1e-11;    // max-norm of the residual vector
    double jacobian_step = 1e-7;    // central-difference step
    double min_damping = 1.0 / 1024.0;
};

struct NewtonResult {
    Eigen::VectorXd x;
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0; // max-norm at exit
};

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Damped Newton with a numerically differenced Jacobian (central differences)
// and backtracking line search on ||f||_inf.
NewtonResult damped_newton(const VectorFn& fn, const Eigen::VectorXd& x0,
                           const NewtonOptions& opts = {});

// Scalar bisection for a strictly monotone function on [lo, hi]. Returns NaN
// when f(lo) and f(hi) do not bracket a root.
double bisect(const std::function<double(double)>& fn, double lo, double hi,
              double xtol = 1e-14, int max_iterations = 200);

} // namespace eecm
