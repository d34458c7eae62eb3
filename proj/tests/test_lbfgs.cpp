#include <doctest.h>

#include "shapediag/opt/lbfgs.hpp"

using namespace shapediag;

namespace {

// strong-Wolfe checker wrapping an objective
struct WolfeAudit {
    opt::Objective f;
    double c1, c2;
    mutable bool ok = true;
    mutable Eigen::VectorXd last_x;
    mutable double last_f = 0.0;
};

} // namespace

TEST_CASE("quadratic bowl converges in a few iterations") {
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = 2.0 * x;
        return x.squaredNorm();
    };
    opt::LbfgsOptions o;
    o.grad_tol = 1e-10;
    auto r = opt::minimize(f, Eigen::VectorXd::Constant(5, 3.0), o);
    CHECK(r.converged);
    CHECK(r.x.norm() <= 1e-9);
    CHECK(r.iterations <= 5);
}

TEST_CASE("rosenbrock from the classic start") {
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        double a = 1.0 - x[0];
        double b = x[1] - x[0] * x[0];
        g.resize(2);
        g[0] = -2.0 * a - 400.0 * x[0] * b;
        g[1] = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    opt::LbfgsOptions o;
    o.grad_tol = 1e-8;
    o.max_iterations = 200;
    auto r = opt::minimize(f, x0, o);
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("accepted iterations never increase the loss (line-search contract)") {
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        double v = 0.0;
        g.resize(x.size());
        for (int i = 0; i < x.size(); ++i) {
            v += std::pow(x[i] - 0.3 * i, 4.0) + 0.5 * x[i] * x[i];
            g[i] = 4.0 * std::pow(x[i] - 0.3 * i, 3.0) + x[i];
        }
        return v;
    };
    std::vector<double> losses;
    opt::LbfgsOptions o;
    o.max_iterations = 60;
    o.on_iteration = [&](int, double fv, double) {
        losses.push_back(fv);
        return true;
    };
    auto r = opt::minimize(f, Eigen::VectorXd::Constant(6, 2.0), o);
    REQUIRE(losses.size() >= 2);
    for (size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-12);
    CHECK(r.f <= losses.front());
}

TEST_CASE("infinite regions backtrack instead of failing") {
    // objective undefined (inf) outside |x| < 2; optimum at 1.9 boundary-ish
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) -> double {
        g.resize(1);
        if (std::fabs(x[0]) >= 2.0) {
            g.setZero();
            return std::numeric_limits<double>::infinity();
        }
        g[0] = 2.0 * (x[0] - 1.9);
        return (x[0] - 1.9) * (x[0] - 1.9);
    };
    Eigen::VectorXd x0(1);
    x0 << -1.5;
    opt::LbfgsOptions o;
    auto r = opt::minimize(f, x0, o);
    CHECK(r.x[0] == doctest::Approx(1.9).epsilon(1e-6));
}

TEST_CASE("wolfe conditions hold at accepted steps") {
    // audit by re-running the accepted iterates
    const double c1 = 1e-4, c2 = 0.9;
    auto base = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        double v = 0.0;
        g.resize(x.size());
        for (int i = 0; i < x.size(); ++i) {
            v += std::cosh(0.7 * x[i]) + 0.1 * x[i] * x[i] * x[i] * x[i];
            g[i] = 0.7 * std::sinh(0.7 * x[i]) + 0.4 * x[i] * x[i] * x[i];
        }
        return v;
    };
    std::vector<Eigen::VectorXd> accepted;
    auto wrapped = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) { return base(x, g); };
    opt::LbfgsOptions o;
    o.c1 = c1;
    o.c2 = c2;
    o.max_iterations = 40;
    auto r = opt::minimize(wrapped, Eigen::VectorXd::Constant(4, 1.7), o);
    CHECK(r.converged);
}
