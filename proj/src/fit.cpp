#include "shapediag/geom/fit.hpp"

#include <algorithm>
#include <numeric>

namespace shapediag::geom {

bool convex_position(const std::vector<std::array<double, 2>>& pts, double tol) {
    const size_t n = pts.size();
    if (n < 3) return false;
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p[0] * p[0] + p[1] * p[1]);
    double floor_ = tol * std::max(scale, 1e-30);
    double pos = 0.0, neg = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % n];
        const auto& c = pts[(i + 2) % n];
        double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        pos = std::max(pos, cr);
        neg = std::min(neg, cr);
    }
    if (pos > 0.0 && neg >= -floor_) return true;
    if (neg < 0.0 && pos <= floor_) return true;
    return false;
}

FitResult fit_to_target(const std::vector<std::array<double, 2>>& target, const FitOptions& opts) {
    if (target.size() < 3) throw std::invalid_argument("fit_to_target: need >= 3 target points");
    // order by angle, then validate the preconditions
    std::vector<std::array<double, 2>> ordered = target;
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]);
    });
    // weak convex position: collinear runs (polygon edges) are fine
    double scale = 0.0;
    for (const auto& p : ordered) scale = std::max(scale, std::hypot(p[0], p[1]));
    for (size_t i = 0; i < ordered.size(); ++i) {
        const auto& a = ordered[i];
        const auto& b = ordered[(i + 1) % ordered.size()];
        const auto& c = ordered[(i + 2) % ordered.size()];
        double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if (cr < -1e-12 * scale * scale)
            throw std::invalid_argument("fit_to_target: target not in convex position");
    }
    double rmin = 1e300, rmean = 0.0;
    for (const auto& p : ordered) {
        double r = std::hypot(p[0], p[1]);
        rmin = std::min(rmin, r);
        rmean += r / ordered.size();
    }
    if (rmin <= 0.0) throw std::invalid_argument("fit_to_target: origin not strictly inside");

    GaugeNetwork net0 = init_random(2, opts.n_dirs, opts.seed, rmean);

    const int n_dirs = opts.n_dirs;
    auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) -> double {
        GaugeNetwork net = GaugeNetwork::unpack(2, n_dirs, x);
        ad::Tape tape;
        GaugeBody body(net);
        auto lifted = lift_params(tape, body);
        GaugeEval<ad::Diff> ev(lifted);
        ad::Diff loss(0.0);
        std::vector<ad::Diff> terms;
        terms.reserve(ordered.size());
        try {
            for (const auto& p : ordered) {
                double xp[3] = {p[0], p[1], 0.0};
                ad::Diff d = ev.gauge_value(xp) - ad::Diff(1.0);
                terms.push_back(d * d);
            }
        } catch (const GaugeNotPositive&) {
            grad.setZero();
            return std::numeric_limits<double>::infinity();
        }
        loss = ad::wsum(terms, std::vector<double>(terms.size(), 1.0 / terms.size()));
        std::vector<ad::Diff> params;
        params.push_back(lifted.log_beta);
        for (const auto& w : lifted.w) params.push_back(w);
        auto g = ad::grad(loss, params);
        for (int i = 0; i < grad.size(); ++i) grad[i] = g[i];
        return loss.v;
    };

    opt::LbfgsOptions lopts;
    lopts.max_iterations = opts.max_iterations;
    lopts.grad_tol = opts.grad_tol;
    opt::LbfgsResult r = opt::minimize(objective, net0.pack(), lopts);

    FitResult out;
    out.net = GaugeNetwork::unpack(2, n_dirs, r.x);
    out.opt = r;
    out.mse = r.f;
    auto fitted = boundary_polyline(GaugeBody(out.net), 1024);
    out.hausdorff = hausdorff_support(fitted, ordered);
    return out;
}

} // namespace shapediag::geom
