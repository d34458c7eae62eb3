#include <doctest.h>

#include "shapediag/geom/fit.hpp"
#include "shapediag/geom/gauge.hpp"
#include "shapediag/util/rng.hpp"

using namespace shapediag;
using geom::GaugeBody;
using geom::GaugeNetwork;

namespace {

GaugeBody disk_body(int dim, int n_dirs = 16) {
    GaugeNetwork net;
    net.dim = dim;
    net.W = Eigen::MatrixXd::Zero(dim, n_dirs);
    net.log_beta = -std::log(std::log(double(n_dirs)));
    return GaugeBody(net);
}

GaugeBody random_body(int dim, uint64_t seed, int n_dirs = 16) {
    return GaugeBody(geom::init_random(dim, n_dirs, seed, 1.0));
}

double gauge_at(const GaugeBody& body, const double* x) {
    auto lifted = geom::lift_params(body);
    geom::GaugeEval<double> ev(lifted);
    return ev.gauge_value(x);
}

} // namespace

TEST_CASE("zero weights give p = |x| log N * beta; LSE(0,0)=ln 2") {
    GaugeNetwork net;
    net.dim = 2;
    net.W = Eigen::MatrixXd::Zero(2, 2);
    net.log_beta = 0.0;
    double x[3] = {1.0, 0.0, 0.0};
    CHECK(gauge_at(GaugeBody(net), x) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("1-homogeneity is exact") {
    GaugeBody body = random_body(2, 42);
    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
        double x[3] = {rng.normal(), rng.normal(), 0.0};
        if (std::hypot(x[0], x[1]) < 1e-6) continue;
        double x2[3] = {2.0 * x[0], 2.0 * x[1], 0.0};
        CHECK(gauge_at(body, x2) == doctest::Approx(2.0 * gauge_at(body, x)).epsilon(1e-14));
    }
}

TEST_CASE("sublinearity p(x+y) <= p(x) + p(y) on 1e4 random pairs") {
    GaugeBody body = random_body(2, 7);
    auto lifted = geom::lift_params(body);
    geom::GaugeEval<double> ev(lifted);
    Rng rng(2);
    int violations = 0;
    for (int k = 0; k < 10000; ++k) {
        double a[3] = {rng.normal(), rng.normal(), 0.0};
        double b[3] = {rng.normal(), rng.normal(), 0.0};
        double ab[3] = {a[0] + b[0], a[1] + b[1], 0.0};
        if (std::hypot(ab[0], ab[1]) < 1e-9) continue;
        if (ev.gauge_value(ab) > ev.gauge_value(a) + ev.gauge_value(b) + 1e-12) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("identity gauge maps the ball to itself; Dphi = I") {
    GaugeBody body = disk_body(2);
    auto lifted = geom::lift_params(body);
    geom::GaugeEval<double> ev(lifted);
    double x[3] = {0.3, -0.2, 0.0};
    std::array<double, 3> phi;
    double jac;
    geom::SphereJet<double> jet;
    ev.volume_point_jet(x, 1, jet, phi, jac);
    CHECK(phi[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(phi[1] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(jac == doctest::Approx(1.0).epsilon(1e-12));
    double nhat[3] = {x[0] / std::hypot(x[0], x[1]), x[1] / std::hypot(x[0], x[1]), 0.0};
    std::array<double, 9> dphi;
    ev.spatial_jacobian(jet, nhat, dphi.data());
    CHECK(dphi[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dphi[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(dphi[2] == doctest::Approx(0.0).scale(1.0));
    CHECK(dphi[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("boundary consistency: p(phi(xhat)) = |xhat| = 1") {
    for (uint64_t seed : {3ull, 4ull, 5ull}) {
        GaugeBody body = random_body(2, seed);
        auto lifted = geom::lift_params(body);
        geom::GaugeEval<double> ev(lifted);
        for (int k = 0; k < 64; ++k) {
            double a = 2.0 * M_PI * k / 64;
            double nhat[3] = {std::cos(a), std::sin(a), 0.0};
            geom::SphereJet<double> jet;
            ev.sphere_jet(nhat, 0, jet);
            double phi[3] = {nhat[0] / jet.q, nhat[1] / jet.q, 0.0};
            CHECK(ev.gauge_value(phi) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("spatial jacobian matches finite differences in x") {
    for (int dim : {2, 3}) {
        GaugeBody body = random_body(dim, 11, dim == 2 ? 16 : 24);
        auto lifted = geom::lift_params(body);
        geom::GaugeEval<double> ev(lifted);
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            double x[3] = {rng.normal(), rng.normal(), dim == 3 ? rng.normal() : 0.0};
            double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            if (r < 0.2) continue;
            for (int d = 0; d < dim; ++d) x[d] *= 0.7 / r;
            double nhat[3];
            for (int d = 0; d < dim; ++d) nhat[d] = x[d] / 0.7;
            if (dim == 2) nhat[2] = 0.0;
            geom::SphereJet<double> jet;
            std::array<double, 3> phi;
            double jac;
            ev.volume_point_jet(x, 1, jet, phi, jac);
            std::array<double, 9> dphi;
            ev.spatial_jacobian(jet, nhat, dphi.data());
            const double h = 1e-6;
            for (int b = 0; b < dim; ++b) {
                double xp[3] = {x[0], x[1], x[2]}, xm[3] = {x[0], x[1], x[2]};
                xp[b] += h;
                xm[b] -= h;
                std::array<double, 3> pp, pm;
                double j2;
                ev.volume_point(xp, pp, j2);
                ev.volume_point(xm, pm, j2);
                for (int a = 0; a < dim; ++a) {
                    double fd = (pp[a] - pm[a]) / (2 * h);
                    CHECK(dphi[a * dim + b] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
                }
            }
        }
    }
}

TEST_CASE("volume jacobian det equals q^-d and matches the matrix determinant") {
    GaugeBody body = random_body(2, 13);
    auto lifted = geom::lift_params(body);
    geom::GaugeEval<double> ev(lifted);
    double x[3] = {0.4, 0.5, 0.0};
    geom::SphereJet<double> jet;
    std::array<double, 3> phi;
    double jac;
    ev.volume_point_jet(x, 1, jet, phi, jac);
    double r = std::hypot(x[0], x[1]);
    double nhat[3] = {x[0] / r, x[1] / r, 0.0};
    std::array<double, 9> dphi;
    ev.spatial_jacobian(jet, nhat, dphi.data());
    double det = dphi[0] * dphi[3] - dphi[1] * dphi[2];
    CHECK(jac == doctest::Approx(det).epsilon(1e-13));
    CHECK(jac == doctest::Approx(std::pow(jet.q, -2.0)).epsilon(1e-13));
}

TEST_CASE("boundary polyline of a random net is in convex position (1024 dirs)") {
    for (uint64_t seed : {21ull, 22ull, 23ull, 24ull}) {
        auto poly = geom::boundary_polyline(random_body(2, seed), 1024);
        CHECK(geom::convex_position(poly));
    }
}

TEST_CASE("init_random: determinism, positivity, cardinal symmetry at zero jitter") {
    GaugeNetwork a = geom::init_random(2, 12, 77, 1.0);
    GaugeNetwork b = geom::init_random(2, 12, 77, 1.0);
    CHECK(a.log_beta == b.log_beta);
    CHECK((a.W - b.W).cwiseAbs().maxCoeff() == 0.0); // bitwise identical
    for (uint64_t seed = 100; seed < 140; ++seed) {
        GaugeBody body = random_body(2, seed);
        CHECK(geom::min_sphere_gauge(body) > 0.0);
    }
    // mean radius ~ scale
    GaugeBody body = random_body(2, 3);
    auto poly = geom::boundary_polyline(body, 512);
    double mean = 0.0;
    for (auto& p : poly) mean += std::hypot(p[0], p[1]) / poly.size();
    CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("symmetrize: trivial group leaves the map unchanged") {
    GaugeNetwork net = geom::init_random(2, 16, 31, 1.0);
    GaugeBody plain(net);
    GaugeBody sym = geom::symmetrize(net, geom::SymmetryGroup::trivial(2));
    double x[3] = {0.37, -0.61, 0.0};
    CHECK(gauge_at(plain, x) == gauge_at(sym, x));
}

TEST_CASE("symmetrize: axis reflections give an equivariant map") {
    GaugeNetwork net = geom::init_random(2, 16, 32, 1.0);
    GaugeBody sym = geom::symmetrize(net, geom::SymmetryGroup::axis_reflections_2d());
    auto lifted = geom::lift_params(sym);
    geom::GaugeEval<double> ev(lifted);
    Rng rng(8);
    for (int k = 0; k < 50; ++k) {
        double a = rng.uniform(0.0, 2.0 * M_PI);
        double n1[3] = {std::cos(a), std::sin(a), 0.0};
        double n2[3] = {-n1[0], n1[1], 0.0}; // reflected direction
        geom::SphereJet<double> j1, j2;
        ev.sphere_jet(n1, 0, j1);
        ev.sphere_jet(n2, 0, j2);
        // equivariance: phi(gx) = g phi(x) means equal radii at reflected dirs
        CHECK(j1.q == doctest::Approx(j2.q).epsilon(1e-12));
    }
}

TEST_CASE("symmetry group validation rejects broken groups") {
    geom::SymmetryGroup g = geom::SymmetryGroup::trivial(2);
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    double th = 2.0 * M_PI / 3.0;
    rot(0, 0) = std::cos(th);
    rot(0, 1) = -std::sin(th);
    rot(1, 0) = std::sin(th);
    rot(1, 1) = std::cos(th);
    g.elements.push_back(rot); // missing rot^2: not closed
    CHECK_THROWS(g.validate());
    geom::SymmetryGroup ok = geom::SymmetryGroup::axis_reflections_2d();
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("gauge positivity error surfaces when directions do not span") {
    GaugeNetwork net;
    net.dim = 2;
    net.W.resize(2, 3);
    // all-negative half-space: LSE goes negative opposite the span
    net.W << 40.0, 40.0, 40.0, 0.0, 0.1, -0.1;
    net.log_beta = 0.0;
    GaugeBody body(net);
    CHECK(geom::min_sphere_gauge(body) < 0.0);
    auto lifted = geom::lift_params(body);
    geom::GaugeEval<double> ev(lifted);
    double x[3] = {-1.0, 0.0, 0.0};
    CHECK_THROWS_AS(ev.gauge_value(x), geom::GaugeNotPositive);
}

TEST_CASE("parameter gradient of p at a point matches finite differences") {
    GaugeNetwork net = geom::init_random(2, 8, 55, 1.0);
    double x[3] = {0.4, -0.8, 0.0};
    ad::Tape tape;
    GaugeBody body(net);
    auto lifted = geom::lift_params(tape, body);
    geom::GaugeEval<ad::Diff> ev(lifted);
    ad::Diff p = ev.gauge_value(x);
    std::vector<ad::Diff> params;
    params.push_back(lifted.log_beta);
    for (auto& w : lifted.w) params.push_back(w);
    auto g = ad::grad(p, params);
    Eigen::VectorXd pk = net.pack();
    const double h = 1e-6;
    for (int k = 0; k < pk.size(); ++k) {
        Eigen::VectorXd pp = pk, pm = pk;
        pp[k] += h;
        pm[k] -= h;
        GaugeBody bp(GaugeNetwork::unpack(2, 8, pp)), bm(GaugeNetwork::unpack(2, 8, pm));
        double fd = (gauge_at(bp, x) - gauge_at(bm, x)) / (2 * h);
        CHECK(g[size_t(k)] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
}
