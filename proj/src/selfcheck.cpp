#include "shapediag/selfcheck.hpp"

#include <cmath>
#include <sstream>

#include "shapediag/ad/linalg.hpp"
#include "shapediag/baseline/valtr.hpp"
#include "shapediag/diagram/catalogue.hpp"
#include "shapediag/fn/functionals.hpp"
#include "shapediag/pde/mfs.hpp"
#include "shapediag/pde/rbf_galerkin.hpp"
#include "shapediag/util/rng.hpp"

namespace shapediag {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Suite {
    std::vector<CheckResult> results;
    std::string filter;

    void add(const std::string& module, const std::string& name, bool pass, double measured,
             double reference) {
        if (!filter.empty() && filter != module) return;
        std::ostringstream d;
        d << "measured " << measured << ", reference " << reference;
        results.push_back({module, name, pass, d.str()});
    }
    bool wants(const std::string& module) const { return filter.empty() || filter == module; }
};

geom::GaugeBody unit_disk_body(int dim) {
    // W = 0 makes the gauge beta |x| log N; beta = 1/log N gives the unit ball
    geom::GaugeNetwork net;
    net.dim = dim;
    net.W = Eigen::MatrixXd::Zero(dim, dim == 2 ? 16 : 48);
    net.log_beta = -std::log(std::log(double(net.W.cols())));
    return geom::GaugeBody(net);
}

double rel_err(double value, double reference) {
    return std::fabs(value - reference) / std::fabs(reference);
}

} // namespace

std::vector<CheckResult> run_checks(const std::string& module_filter) {
    Suite s;
    s.filter = module_filter;

    if (s.wants("quadrature")) {
        auto q = quad::Quadrature::make(2, 0.01, 512);
        double area = 0.0;
        for (double w : q.volume_weights) area += w;
        s.add("quadrature", "disk area rel.err <= 2e-3", rel_err(area, kPi) <= 2e-3, area, kPi);
        bool origin_free = true;
        for (const auto& p : q.volume_nodes)
            if (p[0] == 0.0 && p[1] == 0.0) origin_free = false;
        s.add("quadrature", "no node at the origin", origin_free, origin_free ? 1 : 0, 1);
        std::vector<quad::Point> nd;
        std::vector<double> w;
        quad::sphere_nodes(3, 1000, nd, w);
        double m2 = 0.0;
        for (size_t i = 0; i < nd.size(); ++i) m2 += w[i] * nd[i][2] * nd[i][2];
        s.add("quadrature", "sphere z^2 moment rel.err <= 1e-3", rel_err(m2, 4.0 * kPi / 3.0) <= 1e-3,
              m2, 4.0 * kPi / 3.0);
    }

    if (s.wants("gauge-body")) {
        geom::GaugeNetwork net = geom::init_random(2, 16, 99, 1.0);
        geom::GaugeBody body(net);
        auto lifted = geom::lift_params(body);
        geom::GaugeEval<double> ev(lifted);
        double x1[3] = {0.3, -0.4, 0.0};
        double x2[3] = {0.6, -0.8, 0.0};
        double p1 = ev.gauge_value(x1), p2 = ev.gauge_value(x2);
        s.add("gauge-body", "1-homogeneity p(2x) = 2 p(x)", std::fabs(p2 - 2.0 * p1) <= 1e-14,
              p2, 2.0 * p1);
        // boundary consistency: p(phi(xhat)) = 1
        geom::SphereJet<double> jet;
        double nhat[3] = {std::cos(0.7), std::sin(0.7), 0.0};
        ev.sphere_jet(nhat, 0, jet);
        double ph[3] = {nhat[0] / jet.q, nhat[1] / jet.q, 0.0};
        double back = ev.gauge_value(ph);
        s.add("gauge-body", "p(phi(xhat)) = 1 to 1e-12", std::fabs(back - 1.0) <= 1e-12, back, 1.0);
        // sublinearity on random pairs
        Rng rng(3);
        bool sub = true;
        for (int k = 0; k < 10000; ++k) {
            double a[3] = {rng.normal(), rng.normal(), 0.0};
            double b[3] = {rng.normal(), rng.normal(), 0.0};
            double ab[3] = {a[0] + b[0], a[1] + b[1], 0.0};
            if (std::hypot(ab[0], ab[1]) < 1e-8) continue;
            if (ev.gauge_value(ab) > ev.gauge_value(a) + ev.gauge_value(b) + 1e-12) sub = false;
        }
        s.add("gauge-body", "sublinearity on 1e4 pairs", sub, sub ? 1 : 0, 1);
        auto poly = geom::boundary_polyline(body, 1024);
        bool convex = true;
        for (size_t i = 0; i < poly.size() && convex; ++i) {
            auto& a = poly[i];
            auto& b = poly[(i + 1) % poly.size()];
            auto& c = poly[(i + 2) % poly.size()];
            if ((b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) <= 0.0) convex = false;
        }
        s.add("gauge-body", "1024-direction convex position", convex, convex ? 1 : 0, 1);
    }

    if (s.wants("autodiff-core")) {
        ad::Tape tape;
        ad::Diff x = tape.input(3.0);
        ad::Diff f = x * x;
        auto g = ad::grad(f, std::vector<ad::Diff>{x});
        s.add("autodiff-core", "d(x^2)/dx at 3 = 6", std::fabs(g[0] - 6.0) <= 1e-14, g[0], 6.0);
        tape.clear();
        ad::DiffMatrix a = ad::DiffMatrix::from(tape, Eigen::MatrixXd::Identity(2, 2));
        ad::Diff det = ad::determinant(a);
        tape.backward(det.ix);
        bool ok = std::fabs(tape.adjoint(a.ix[0]) - 1.0) < 1e-14 &&
                  std::fabs(tape.adjoint(a.ix[1])) < 1e-14 &&
                  std::fabs(tape.adjoint(a.ix[3]) - 1.0) < 1e-14;
        s.add("autodiff-core", "grad det at identity = cofactor", ok, ok ? 1 : 0, 1);
    }

    if (s.wants("functionals")) {
        auto q = quad::Quadrature::make(2, 0.01, 512);
        geom::GaugeBody disk = unit_disk_body(2);
        auto lifted = geom::lift_params(disk);
        geom::GaugeEval<double> ev(lifted);
        double vol = fn::volume(ev, q);
        s.add("functionals", "vol(disk) rel.err <= 2e-3", rel_err(vol, kPi) <= 2e-3, vol, kPi);
        double per = fn::perimeter(ev, q);
        s.add("functionals", "per(disk) rel.err <= 1e-6", rel_err(per, 2.0 * kPi) <= 1e-6, per,
              2.0 * kPi);
        auto ci = fn::centroid_and_inertia(ev, q);
        s.add("functionals", "w(disk) rel.err <= 2e-3", rel_err(ci.inertia, kPi / 2.0) <= 2e-3,
              ci.inertia, kPi / 2.0);
        double e = fn::willmore(ev, q);
        s.add("functionals", "willmore(disk) rel.err <= 1e-6", rel_err(e, 2.0 * kPi) <= 1e-6, e,
              2.0 * kPi);
        double t = pde::torsion(ev, q, pde::MfsConfig::standard(2));
        s.add("functionals", "torsion(disk) rel.err <= 1e-3", rel_err(t, kPi / 8.0) <= 1e-3, t,
              kPi / 8.0);
        auto qp = quad::Quadrature::make(2, 0.05, 256);
        pde::RbfConfig rc;
        auto plan = pde::RbfPlan::build(qp, rc);
        auto mu = pde::neumann_eigs(ev, qp, *plan, rc);
        double mu_ref = diagram::kBesselJ1PrimeRoot * diagram::kBesselJ1PrimeRoot;
        s.add("functionals", "mu1(disk) rel.err <= 2e-2", rel_err(mu.mu1, mu_ref) <= 2e-2, mu.mu1,
              mu_ref);
        s.add("functionals", "mu2(disk) rel.err <= 2e-2", rel_err(mu.mu2, mu_ref) <= 2e-2, mu.mu2,
              mu_ref);
    }

    if (s.wants("pde-functionals")) {
        // scaling: mu is (-2)-homogeneous, exact under the beta pull-back
        geom::GaugeBody disk = unit_disk_body(2);
        geom::GaugeBody half = disk;
        half.net.log_beta += std::log(2.0); // radius shrinks by 2
        auto q = quad::Quadrature::make(2, 0.05, 256);
        pde::RbfConfig rc;
        auto plan = pde::RbfPlan::build(q, rc);
        auto l1 = geom::lift_params(disk);
        auto l2 = geom::lift_params(half);
        geom::GaugeEval<double> e1(l1), e2(l2);
        auto m1 = pde::neumann_eigs(e1, q, *plan, rc);
        auto m2 = pde::neumann_eigs(e2, q, *plan, rc);
        s.add("pde-functionals", "mu1 scaling t^-2 rel.err <= 1e-3",
              rel_err(m2.mu1 / 4.0, m1.mu1) <= 1e-3, m2.mu1 / 4.0, m1.mu1);
        s.add("pde-functionals", "mu ordering mu1 <= mu2", m1.mu1 <= m1.mu2, m1.mu1, m1.mu2);
    }

    if (s.wants("baseline-random")) {
        bool convex = true;
        for (int k = 0; k < 1000; ++k)
            if (!baseline::valtr_polygon(20, 1000 + k).strictly_convex()) convex = false;
        s.add("baseline-random", "valtr polygons strictly convex", convex, convex ? 1 : 0, 1);
        baseline::ConvexPolygon sq;
        sq.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        auto f = baseline::polygon_functionals(sq);
        bool ok = std::fabs(f.vol - 1.0) < 1e-14 && std::fabs(f.per - 4.0) < 1e-14 &&
                  std::fabs(f.w - 1.0 / 6.0) < 1e-14;
        s.add("baseline-random", "unit square vol/per/w exact", ok, f.w, 1.0 / 6.0);
    }

    return s.results;
}

} // namespace shapediag
