#include "shapediag/diagram/riesz.hpp"

#include <cmath>

#include "shapediag/util/parallel.hpp"
#include "shapediag/util/rng.hpp"

namespace shapediag::diagram {

void SamplerConfig::resolve(int dim) {
    if (n_dirs == 0) n_dirs = (dim == 2) ? 16 : 48;
    if (quad_h == 0.0) quad_h = (dim == 2) ? 0.01 : 0.05;
    if (quad_boundary == 0) quad_boundary = (dim == 2) ? 512 : 2048;
}

void SamplerConfig::validate() const {
    if (n_particles < 2) throw std::invalid_argument("N >= 2 required");
    if (!(riesz_s > 2.0)) throw std::invalid_argument("riesz exponent must satisfy s > 2");
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    if (!(eps_dist >= 0.0)) throw std::invalid_argument("eps_dist must be >= 0");
}

double riesz_energy(std::span<const std::pair<double, double>> pts, double s, double eps) {
    const size_t n = pts.size();
    double total = 0.0;
    double closest = 1e300;
    size_t ci = 0, cj = 1;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double dx = pts[i].first - pts[j].first;
            double dy = pts[i].second - pts[j].second;
            double d2 = dx * dx + dy * dy;
            if (d2 < closest) {
                closest = d2;
                ci = i;
                cj = j;
            }
            total += 2.0 * std::pow(d2 + eps * eps, -s / 2.0);
        }
    if (!std::isfinite(total))
        throw std::runtime_error("riesz energy not finite; closest pair (" + std::to_string(ci) +
                                 ", " + std::to_string(cj) + ")");
    return total;
}

SpreadStats spread_stats(std::span<const std::pair<double, double>> pts) {
    const size_t n = pts.size();
    SpreadStats st;
    if (n < 2) return st;
    std::vector<double> nn(n, 1e300);
    st.min_pair_distance = 1e300;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double dx = pts[i].first - pts[j].first;
            double dy = pts[i].second - pts[j].second;
            double d = std::sqrt(dx * dx + dy * dy);
            nn[i] = std::min(nn[i], d);
            nn[j] = std::min(nn[j], d);
            st.min_pair_distance = std::min(st.min_pair_distance, d);
        }
    double mean = 0.0;
    for (double d : nn) mean += d / n;
    double var = 0.0;
    for (double d : nn) var += (d - mean) * (d - mean) / n;
    st.nn_mean = mean;
    st.nn_cov = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    return st;
}

ad::Diff riesz_loss(std::span<const geom::GaugeBody> bodies, DiagramId id, const EvalContext& ctx,
                    double s, double alpha, double eps, ad::Tape& tape) {
    const size_t n = bodies.size();
    if (n < 2) throw std::invalid_argument("riesz_loss: N >= 2 required");
    std::vector<ad::Diff> xs(n), ys(n);
    ad::Diff reg(0.0);
    std::vector<geom::LiftedGauge<ad::Diff>> lifted;
    lifted.reserve(n);
    for (size_t i = 0; i < n; ++i) lifted.push_back(geom::lift_params(tape, bodies[i]));
    for (size_t i = 0; i < n; ++i) {
        geom::GaugeEval<ad::Diff> ev(lifted[i]);
        auto dp = diagram_point_diff(id, ev, ctx);
        xs[i] = dp.x;
        ys[i] = dp.y;
        if (alpha > 0.0) reg += fn::max_jacobian_cond(ev, *ctx.quad);
    }
    ad::Diff total(0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            ad::Diff dx = xs[i] - xs[j];
            ad::Diff dy = ys[i] - ys[j];
            total += ad::Diff(2.0) * ad::pow(dx * dx + dy * dy + ad::Diff(eps * eps), -s / 2.0);
        }
    if (!std::isfinite(total.v)) {
        std::vector<std::pair<double, double>> pts(n);
        for (size_t i = 0; i < n; ++i) pts[i] = {xs[i].v, ys[i].v};
        riesz_energy(pts, s, eps); // throws with the closest pair named
    }
    return total + ad::Diff(alpha) * reg;
}

namespace {

struct ParticleSlot {
    std::unique_ptr<ad::Tape> tape;
    std::vector<int64_t> param_ids;
    int64_t x_ix = -1, y_ix = -1, reg_ix = -1;
    double x = 0.0, y = 0.0, reg = 0.0;
    bool failed = false;
};

} // namespace

DiagramResult run_sampler(DiagramId id, const SamplerConfig& cfg_in) {
    SamplerConfig cfg = cfg_in;
    const int dim = diagram_dim(id);
    cfg.resolve(dim);
    cfg.validate();
    const int n = cfg.n_particles;
    const int pp = 1 + dim * cfg.n_dirs;

    quad::Quadrature q = quad::Quadrature::make(dim, cfg.quad_h, cfg.quad_boundary);
    EvalContext ctx;
    ctx.quad = &q;
    ctx.mfs = cfg.mfs;
    ctx.rbf = cfg.rbf;
    if (id == DiagramId::VMU2) ctx.rbf_plan = pde::RbfPlan::build(q, cfg.rbf);

    geom::SymmetryGroup group = diagram_symmetric(id) ? geom::SymmetryGroup::axis_reflections_2d()
                                                      : geom::SymmetryGroup::trivial(dim);

    // initial particles
    Eigen::VectorXd x0(n * pp);
    for (int i = 0; i < n; ++i) {
        uint64_t pseed = Rng::substream(cfg.seed, uint64_t(i)).next_u64();
        geom::GaugeNetwork net = geom::init_random(dim, cfg.n_dirs, pseed, cfg.init_scale);
        x0.segment(int64_t(i) * pp, pp) = net.pack();
    }

    std::vector<ParticleSlot> slots(n);
    for (auto& s : slots) s.tape = std::make_unique<ad::Tape>();

    auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) -> double {
        // record every particle on its own tape (parallel, slot-local writes)
        parallel_for(n, [&](int i) {
            ParticleSlot& sl = slots[i];
            sl.failed = false;
            sl.tape->clear();
            geom::GaugeNetwork net =
                geom::GaugeNetwork::unpack(dim, cfg.n_dirs, x.segment(int64_t(i) * pp, pp));
            geom::GaugeBody body(std::move(net), group);
            try {
                auto lifted = geom::lift_params(*sl.tape, body);
                sl.param_ids.clear();
                sl.param_ids.push_back(lifted.log_beta.ix);
                for (const auto& w : lifted.w) sl.param_ids.push_back(w.ix);
                geom::GaugeEval<ad::Diff> ev(lifted);
                auto dp = diagram_point_diff(id, ev, ctx);
                sl.x = dp.x.v;
                sl.y = dp.y.v;
                sl.x_ix = dp.x.ix;
                sl.y_ix = dp.y.ix;
                if (cfg.alpha > 0.0) {
                    ad::Diff reg = fn::max_jacobian_cond(ev, q);
                    sl.reg = reg.v;
                    sl.reg_ix = reg.ix;
                } else {
                    sl.reg = 0.0;
                    sl.reg_ix = -1;
                }
            } catch (const geom::GaugeNotPositive&) {
                sl.failed = true;
            } catch (const std::runtime_error&) {
                sl.failed = true;
            }
        });
        for (const auto& sl : slots)
            if (sl.failed || !std::isfinite(sl.x) || !std::isfinite(sl.y) ||
                !std::isfinite(sl.reg)) {
                grad.setZero();
                return std::numeric_limits<double>::infinity();
            }

        // pair energy and seeds (sequential, deterministic)
        double energy = 0.0;
        std::vector<double> gx(n, 0.0), gy(n, 0.0);
        const double s = cfg.riesz_s, e2 = cfg.eps_dist * cfg.eps_dist;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double dx = slots[i].x - slots[j].x;
                double dy = slots[i].y - slots[j].y;
                double d2 = dx * dx + dy * dy + e2;
                double p = std::pow(d2, -s / 2.0);
                energy += 2.0 * p;
                double c = -2.0 * s * p / d2; // d/dx_i of 2 d2^{-s/2}
                gx[i] += c * dx;
                gy[i] += c * dy;
                gx[j] -= c * dx;
                gy[j] -= c * dy;
            }
        double loss = energy;
        for (const auto& sl : slots) loss += cfg.alpha * sl.reg;
        if (!std::isfinite(loss)) {
            grad.setZero();
            return std::numeric_limits<double>::infinity();
        }

        // reverse sweeps (parallel, slot-local writes)
        std::vector<int> bad(n, 0);
        parallel_for(n, [&](int i) {
            ParticleSlot& sl = slots[i];
            std::vector<std::pair<int64_t, double>> seeds;
            seeds.push_back({sl.x_ix, gx[i]});
            seeds.push_back({sl.y_ix, gy[i]});
            if (sl.reg_ix >= 0) seeds.push_back({sl.reg_ix, cfg.alpha});
            try {
                sl.tape->backward_multi(seeds);
                for (int k = 0; k < pp; ++k)
                    grad[int64_t(i) * pp + k] = sl.tape->adjoint(sl.param_ids[k]);
            } catch (const ad::NonFiniteAdjoint&) {
                bad[i] = 1;
            }
        });
        for (int i = 0; i < n; ++i)
            if (bad[i]) {
                grad.setZero();
                return std::numeric_limits<double>::infinity();
            }
        return loss;
    };

    DiagramResult res;
    res.id = id;
    res.dim = dim;
    res.group = group;

    opt::LbfgsOptions lopts = cfg.lbfgs;
    auto log_cb = [&](int iter, double f, double gn) {
        res.log.push_back({iter, f, gn});
        return true;
    };
    lopts.on_iteration = log_cb;
    opt::LbfgsResult r = opt::minimize(objective, x0, lopts);
    if (r.line_search_failed) {
        // halve the memory and retry once from where we stopped
        opt::LbfgsOptions retry = lopts;
        retry.memory = std::max(1, lopts.memory / 2);
        retry.max_iterations = std::max(1, lopts.max_iterations - r.iterations);
        opt::LbfgsResult r2 = opt::minimize(objective, r.x, retry);
        r2.iterations += r.iterations;
        r = r2;
    }
    res.converged = !r.line_search_failed;
    res.message = r.message;
    res.final_loss = r.f;
    res.iterations = r.iterations;

    // final primal evaluation, exports and bound checks
    res.nets.resize(n);
    res.points.resize(n);
    std::exception_ptr err;
    parallel_for(n, [&](int i) {
        geom::GaugeNetwork net =
            geom::GaugeNetwork::unpack(dim, cfg.n_dirs, r.x.segment(int64_t(i) * pp, pp));
        res.nets[i] = net;
        DiagramPoint p = diagram_point(id, geom::GaugeBody(net, group), ctx);
        res.points[i] = {i, p.x, p.y, p.raw};
    });
    for (const auto& row : res.points)
        if (!bounds_ok(id, row.x, row.y, cfg.bound_tol)) ++res.bound_violations;
    return res;
}

} // namespace shapediag::diagram
