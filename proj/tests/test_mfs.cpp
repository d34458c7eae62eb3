#include <doctest.h>

#include "shapediag/pde/mfs.hpp"
#include "shapediag/fn/functionals.hpp"
#include "shapediag/util/rng.hpp"

using namespace shapediag;
using geom::GaugeBody;
using geom::GaugeNetwork;

namespace {
constexpr double kPi = 3.14159265358979323846;

GaugeBody ball_body(int dim, int n_dirs) {
    GaugeNetwork net;
    net.dim = dim;
    net.W = Eigen::MatrixXd::Zero(dim, n_dirs);
    net.log_beta = -std::log(std::log(double(n_dirs)));
    return GaugeBody(net);
}

// classical series for the torsion of a square of side a:
// T = (a^4/4) (1/3 - (64/pi^5) sum_{n odd} tanh(n pi/2)/n^5)
double square_torsion(double side) {
    double sum = 0.0;
    for (int n = 1; n < 400; n += 2) sum += std::tanh(n * kPi / 2.0) / std::pow(double(n), 5.0);
    return std::pow(side, 4.0) / 4.0 * (1.0 / 3.0 - 64.0 / std::pow(kPi, 5.0) * sum);
}
} // namespace

TEST_CASE("disk torsion = pi/8 within 1e-3 relative") {
    auto q = quad::Quadrature::make(2, 0.01, 512);
    GaugeBody disk = ball_body(2, 16);
    auto lifted = geom::lift_params(disk);
    geom::GaugeEval<double> ev(lifted);
    double t = pde::torsion(ev, q, pde::MfsConfig::standard(2));
    CHECK(t == doctest::Approx(kPi / 8.0).epsilon(1e-3));
    CHECK(t > 0.0);
}

TEST_CASE("3D ball torsion = (4pi/3)/15 within 5e-3 relative") {
    auto q = quad::Quadrature::make(3, 0.05, 512);
    GaugeBody ball = ball_body(3, 48);
    auto lifted = geom::lift_params(ball);
    geom::GaugeEval<double> ev(lifted);
    double t = pde::torsion(ev, q, pde::MfsConfig::standard(3));
    CHECK(t == doctest::Approx(4.0 * kPi / 45.0).epsilon(5e-3));
}

TEST_CASE("dilation equivariance is exact: T(t Omega) = t^4 T(Omega)") {
    // the constant column makes the 2D fitted space scale-equivariant
    auto q = quad::Quadrature::make(2, 0.03, 256);
    GaugeBody body(geom::init_random(2, 16, 3, 1.0));
    GaugeBody doubled = body;
    doubled.net.log_beta -= std::log(2.0);
    auto l1 = geom::lift_params(body);
    auto l2 = geom::lift_params(doubled);
    geom::GaugeEval<double> e1(l1), e2(l2);
    auto cfg = pde::MfsConfig::standard(2);
    double t1 = pde::torsion(e1, q, cfg);
    double t2 = pde::torsion(e2, q, cfg);
    CHECK(t2 == doctest::Approx(16.0 * t1).epsilon(1e-8));
    CHECK(t2 > t1); // torsion grows under dilation
}

TEST_CASE("random body: torsion positive and Saint-Venant holds") {
    auto q = quad::Quadrature::make(2, 0.02, 256);
    auto cfg = pde::MfsConfig::standard(2);
    for (uint64_t seed = 40; seed < 48; ++seed) {
        GaugeBody body(geom::init_random(2, 16, seed, 1.0));
        auto lifted = geom::lift_params(body);
        geom::GaugeEval<double> ev(lifted);
        double t = pde::torsion(ev, q, cfg);
        CHECK(t > 0.0);
        double vol = fn::volume(ev, q);
        // Saint-Venant: T <= T(ball of same volume) = vol^2/(8 pi)
        CHECK(t <= vol * vol / (8.0 * kPi) * (1.0 + 2e-2));
    }
}

TEST_CASE("torsion parameter gradient matches central differences to 1e-3") {
    auto q = quad::Quadrature::make(2, 0.05, 128);
    const int nd = 6;
    GaugeNetwork net = geom::init_random(2, nd, 21, 1.0);
    pde::MfsConfig cfg;
    cfg.n_sources = 24;
    cfg.n_collocation = 64;

    ad::Tape tape;
    GaugeBody body(net);
    auto lifted = geom::lift_params(tape, body);
    geom::GaugeEval<ad::Diff> ev(lifted);
    ad::Diff t = pde::torsion(ev, q, cfg);
    std::vector<ad::Diff> params;
    params.push_back(lifted.log_beta);
    for (auto& w : lifted.w) params.push_back(w);
    auto g = ad::grad(t, params);

    Eigen::VectorXd p0 = net.pack();
    auto value = [&](const Eigen::VectorXd& p) {
        GaugeBody b(GaugeNetwork::unpack(2, nd, p));
        auto lg = geom::lift_params(b);
        geom::GaugeEval<double> e(lg);
        return pde::torsion(e, q, cfg);
    };
    const double h = 1e-5;
    for (int k = 0; k < p0.size(); ++k) {
        Eigen::VectorXd pp = p0, pm = p0;
        pp[k] += h;
        pm[k] -= h;
        double fd = (value(pp) - value(pm)) / (2 * h);
        CHECK(g[size_t(k)] == doctest::Approx(fd).epsilon(1e-3).scale(0.1));
    }
}

TEST_CASE("config validation") {
    pde::MfsConfig bad;
    bad.n_sources = 64;
    bad.n_collocation = 100; // < 2x sources
    CHECK_THROWS(bad.validate());
    bad = pde::MfsConfig{};
    bad.offset = 0.0;
    CHECK_THROWS(bad.validate());
    CHECK_NOTHROW(pde::MfsConfig::standard(2).validate());
    CHECK_NOTHROW(pde::MfsConfig::standard(3).validate());
}

TEST_CASE("square torsion series oracle sanity") {
    // known torsion coefficient for the unit square: ~0.0351444
    CHECK(square_torsion(1.0) == doctest::Approx(0.0351444).epsilon(1e-4));
    CHECK(square_torsion(2.0) == doctest::Approx(0.5623).epsilon(1e-3));
}
