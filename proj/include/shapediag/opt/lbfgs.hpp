#ifndef SHAPEDIAG_OPT_LBFGS_HPP
#define SHAPEDIAG_OPT_LBFGS_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace shapediag::opt {

// Objective: fills the gradient and returns f(x). May return +inf outside
// the feasible region; the line search then backtracks.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
    int memory = 10;
    double c1 = 1e-4; // sufficient decrease
    double c2 = 0.9;  // curvature
    double grad_tol = 1e-6;
    int max_iterations = 500;
    int max_line_search = 30;
    // callback per accepted iteration: (iter, f, |grad|); return false to stop
    std::function<bool(int, double, double)> on_iteration;
};

struct LbfgsResult {
    Eigen::VectorXd x;
    double f = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;       // grad_tol reached
    bool line_search_failed = false;
    std::string message;
};

// L-BFGS with a strong-Wolfe bracket/zoom line search
// (Nocedal & Wright, Algorithms 3.5/3.6 and Chapter 7).
LbfgsResult minimize(const Objective& f, const Eigen::VectorXd& x0, const LbfgsOptions& opts);

} // namespace shapediag::opt

#endif
