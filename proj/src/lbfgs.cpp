#include "shapediag/opt/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace shapediag::opt {

namespace {

struct Eval {
    double f;
    double dg; // directional derivative along the search direction
};

// cubic interpolation minimizer of a bracketing interval; falls back to
// bisection when the cubic is unreliable
double interp(double a, double fa, double ga, double b, double fb, double gb) {
    double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
    double disc = d1 * d1 - ga * gb;
    if (disc >= 0.0) {
        double d2 = std::sqrt(disc) * (b > a ? 1.0 : -1.0);
        double t = b - (b - a) * ((gb + d2 - d1) / (gb - ga + 2.0 * d2));
        double lo = std::min(a, b), hi = std::max(a, b);
        double margin = 0.1 * (hi - lo);
        if (std::isfinite(t) && t > lo + margin && t < hi - margin) return t;
    }
    return 0.5 * (a + b);
}

} // namespace

LbfgsResult minimize(const Objective& obj, const Eigen::VectorXd& x0, const LbfgsOptions& opts) {
    const int n = int(x0.size());
    LbfgsResult res;
    res.x = x0;

    Eigen::VectorXd g(n), x = x0;
    double f = obj(x, g);
    if (!std::isfinite(f)) {
        res.message = "objective not finite at the starting point";
        res.f = f;
        return res;
    }

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    Eigen::VectorXd d(n), x_new(n), g_new(n);
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        double gnorm = g.norm();
        if (gnorm <= opts.grad_tol) {
            res.converged = true;
            break;
        }

        // two-loop recursion
        d = -g;
        std::vector<double> alpha(s_hist.size());
        for (int i = int(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(d);
            d -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            d *= gamma;
        }
        for (size_t i = 0; i < s_hist.size(); ++i) {
            double beta = rho_hist[i] * y_hist[i].dot(d);
            d += (alpha[i] - beta) * s_hist[i];
        }

        double dg0 = g.dot(d);
        if (dg0 >= 0.0) { // fall back to steepest descent
            d = -g;
            dg0 = -gnorm * gnorm;
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // strong-Wolfe line search: bracket then zoom
        auto phi = [&](double t, Eval& e) {
            x_new = x + t * d;
            e.f = obj(x_new, g_new);
            e.dg = std::isfinite(e.f) ? g_new.dot(d) : 0.0;
            return e.f;
        };

        double t_prev = 0.0, f_prev = f, dg_prev = dg0;
        // without curvature history the natural quasi-Newton scale is
        // unknown; start at ~unit step length so huge first gradients
        // (near-coincident Riesz particles) stay reachable by backtracking
        double t = s_hist.empty() ? std::min(1.0, 1.0 / std::max(1.0, gnorm)) : 1.0;
        double t_max = 1e8;
        bool accepted = false;
        Eval e{};
        for (int ls = 0; ls < opts.max_line_search && !accepted; ++ls) {
            phi(t, e);
            bool armijo_fail = !(e.f <= f + opts.c1 * t * dg0) || !std::isfinite(e.f);
            if (armijo_fail || (ls > 0 && e.f >= f_prev)) {
                // zoom between t_prev (good) and t (bad)
                double lo = t_prev, hi = t;
                double flo = f_prev, dglo = dg_prev;
                double fhi = e.f, dghi = e.dg;
                for (int z = 0; z < opts.max_line_search; ++z) {
                    double tm = std::isfinite(fhi) ? interp(lo, flo, dglo, hi, fhi, dghi)
                                                   : 0.5 * (lo + hi);
                    phi(tm, e);
                    if (!(e.f <= f + opts.c1 * tm * dg0) || !std::isfinite(e.f) || e.f >= flo) {
                        hi = tm;
                        fhi = e.f;
                        dghi = e.dg;
                    } else {
                        if (std::fabs(e.dg) <= -opts.c2 * dg0) {
                            t = tm;
                            accepted = true;
                            break;
                        }
                        if (e.dg * (hi - lo) >= 0.0) {
                            hi = lo;
                            fhi = flo;
                            dghi = dglo;
                        }
                        lo = tm;
                        flo = e.f;
                        dglo = e.dg;
                    }
                    if (std::fabs(hi - lo) < 1e-14 * std::max(1.0, std::fabs(lo))) break;
                }
                break;
            }
            if (std::fabs(e.dg) <= -opts.c2 * dg0) {
                accepted = true;
                break;
            }
            if (e.dg >= 0.0) {
                // overshot the minimum: zoom with roles swapped
                double lo = t, hi = t_prev;
                double flo = e.f, dglo = e.dg;
                double fhi = f_prev, dghi = dg_prev;
                for (int z = 0; z < opts.max_line_search; ++z) {
                    double tm = interp(lo, flo, dglo, hi, fhi, dghi);
                    phi(tm, e);
                    if (!(e.f <= f + opts.c1 * tm * dg0) || !std::isfinite(e.f) || e.f >= flo) {
                        hi = tm;
                        fhi = e.f;
                        dghi = e.dg;
                    } else {
                        if (std::fabs(e.dg) <= -opts.c2 * dg0) {
                            t = tm;
                            accepted = true;
                            break;
                        }
                        if (e.dg * (hi - lo) >= 0.0) {
                            hi = lo;
                            fhi = flo;
                            dghi = dglo;
                        }
                        lo = tm;
                        flo = e.f;
                        dglo = e.dg;
                    }
                    if (std::fabs(hi - lo) < 1e-14 * std::max(1.0, std::fabs(lo))) break;
                }
                break;
            }
            t_prev = t;
            f_prev = e.f;
            dg_prev = e.dg;
            t = std::min(2.0 * t, t_max);
        }

        if (!accepted) {
            res.line_search_failed = true;
            res.message = "line search failed to satisfy the strong Wolfe conditions";
            break;
        }

        // x_new and g_new hold the accepted point (last phi call)
        Eigen::VectorXd s = x_new - x;
        Eigen::VectorXd yv = g_new - g;
        double sy = s.dot(yv);
        if (sy > 1e-10 * s.norm() * yv.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(yv);
            rho_hist.push_back(1.0 / sy);
            if (int(s_hist.size()) > opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = x_new;
        f = e.f;
        g = g_new;
        if (opts.on_iteration && !opts.on_iteration(iter + 1, f, g.norm())) {
            ++iter;
            break;
        }
    }

    res.x = x;
    res.f = f;
    res.grad_norm = g.norm();
    res.iterations = iter;
    if (res.converged) res.message = "gradient tolerance reached";
    else if (res.message.empty()) res.message = "iteration limit reached";
    return res;
}

} // namespace shapediag::opt
