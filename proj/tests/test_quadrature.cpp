#include <doctest.h>

#include <cmath>

#include "shapediag/quad/quadrature.hpp"

using namespace shapediag;

namespace {
constexpr double kPi = 3.14159265358979323846;

double integrate_disk(double h, double (*f)(double, double)) {
    std::vector<quad::Point> nodes;
    std::vector<double> w;
    quad::ball_lattice(2, h, nodes, w);
    double s = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) s += w[i] * f(nodes[i][0], nodes[i][1]);
    return s;
}
} // namespace

TEST_CASE("disk area converges: h=0.01 within 2e-3 relative") {
    double a = integrate_disk(0.01, [](double, double) { return 1.0; });
    CHECK(a == doctest::Approx(kPi).epsilon(2e-3));
}

TEST_CASE("coarse grid h~1 keeps the four diagonal cells") {
    std::vector<quad::Point> nodes;
    std::vector<double> w;
    quad::ball_lattice(2, 0.999999, nodes, w); // h < 1 required; same cells as h=1
    // centers (+-h/2, +-h/2), all at norm ~0.707 inside the disk
    CHECK(nodes.size() == 4);
    double total = 0.0;
    for (double v : w) total += v;
    CHECK(total == doctest::Approx(4.0 * 0.999999 * 0.999999).epsilon(1e-9));
}

TEST_CASE("no volume node at the origin for any h") {
    for (double h : {0.5, 0.25, 0.1, 0.033}) {
        std::vector<quad::Point> nodes;
        std::vector<double> w;
        quad::ball_lattice(2, h, nodes, w);
        for (const auto& p : nodes) CHECK(p[0] * p[0] + p[1] * p[1] > 1e-12);
    }
}

TEST_CASE("2D sphere nodes: equispaced angles, exact total weight") {
    std::vector<quad::Point> nodes;
    std::vector<double> w;
    quad::sphere_nodes(2, 8, nodes, w);
    CHECK(nodes.size() == 8);
    CHECK(nodes[2][0] == doctest::Approx(0.0).scale(1.0)); // angle pi/2
    CHECK(nodes[2][1] == doctest::Approx(1.0));
    double total = 0.0;
    for (double v : w) total += v;
    CHECK(total == doctest::Approx(2.0 * kPi).epsilon(1e-15));
}

TEST_CASE("3D Fibonacci sphere: total weight exact, z^2 moment to 1e-3") {
    std::vector<quad::Point> nodes;
    std::vector<double> w;
    quad::sphere_nodes(3, 1000, nodes, w);
    double total = 0.0, m2 = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        total += w[i];
        m2 += w[i] * nodes[i][2] * nodes[i][2];
        double r = std::sqrt(nodes[i][0] * nodes[i][0] + nodes[i][1] * nodes[i][1] +
                             nodes[i][2] * nodes[i][2]);
        CHECK(std::fabs(r - 1.0) <= 1e-14);
    }
    CHECK(total == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    CHECK(m2 == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-3));
}

TEST_CASE("mesh refinement at least first order on a smooth integrand") {
    auto f = [](double x, double y) { return std::exp(x) * (1.0 + 0.5 * y); };
    double ref = integrate_disk(0.002, [](double x, double y) {
        return std::exp(x) * (1.0 + 0.5 * y);
    });
    double e1 = std::fabs(integrate_disk(0.04, f) - ref);
    double e2 = std::fabs(integrate_disk(0.01, f) - ref);
    CHECK(e2 * 3.0 < e1); // 4x refinement must cut the error at least 3x
}

TEST_CASE("determinism: identical inputs give identical node sets") {
    std::vector<quad::Point> a, b;
    std::vector<double> wa, wb;
    quad::ball_lattice(3, 0.07, a, wa);
    quad::ball_lattice(3, 0.07, b, wb);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        CHECK(wa[i] == wb[i]);
    }
}

TEST_CASE("3D ball volume at default h") {
    std::vector<quad::Point> nodes;
    std::vector<double> w;
    quad::ball_lattice(3, 0.05, nodes, w);
    double total = 0.0;
    for (double v : w) total += v;
    CHECK(total == doctest::Approx(4.0 * kPi / 3.0).epsilon(2e-3));
}

TEST_CASE("boundary nodes stay on the sphere, volume nodes inside") {
    auto q = quad::Quadrature::make(2, 0.05, 64);
    for (const auto& p : q.volume_nodes) CHECK(p[0] * p[0] + p[1] * p[1] < 1.0);
    for (const auto& p : q.boundary_nodes)
        CHECK(std::fabs(std::hypot(p[0], p[1]) - 1.0) <= 1e-14);
}
