#include <doctest.h>

#include "shapediag/geom/fit.hpp"
#include "shapediag/util/rng.hpp"

using namespace shapediag;

namespace {
std::vector<std::array<double, 2>> circle_target(int m) {
    std::vector<std::array<double, 2>> t;
    for (int k = 0; k < m; ++k) {
        double a = 2.0 * M_PI * k / m;
        t.push_back({std::cos(a), std::sin(a)});
    }
    return t;
}

std::vector<std::array<double, 2>> square_target(int per_edge) {
    std::vector<std::array<double, 2>> t;
    for (int k = 0; k < per_edge; ++k) {
        double u = -1.0 + 2.0 * (k + 0.5) / per_edge;
        t.push_back({u, -1.0});
        t.push_back({1.0, u});
        t.push_back({-u, 1.0});
        t.push_back({-1.0, -u});
    }
    return t;
}

std::vector<std::array<double, 2>> triangle_target() {
    std::vector<std::array<double, 2>> t;
    double v[3][2] = {{1.2, -0.7}, {0.0, 1.3}, {-1.2, -0.7}};
    for (int e = 0; e < 3; ++e)
        for (int k = 0; k < 90; ++k) {
            double u = (k + 0.5) / 90;
            t.push_back({v[e][0] + u * (v[(e + 1) % 3][0] - v[e][0]),
                         v[e][1] + u * (v[(e + 1) % 3][1] - v[e][1])});
        }
    return t;
}
} // namespace

TEST_CASE("circle fit with N=8 reaches hausdorff <= 1e-3") {
    geom::FitOptions o;
    o.n_dirs = 8;
    o.seed = 2;
    auto r = geom::fit_to_target(circle_target(256), o);
    CHECK(r.hausdorff <= 1e-3);
}

TEST_CASE("square fit with N=32 reaches hausdorff <= 0.02") {
    geom::FitOptions o;
    o.n_dirs = 32;
    o.seed = 3;
    o.max_iterations = 1500;
    auto r = geom::fit_to_target(square_target(128), o);
    CHECK(r.hausdorff <= 0.02);
}

TEST_CASE("triangle fit stays convex") {
    geom::FitOptions o;
    o.n_dirs = 24;
    o.seed = 4;
    auto r = geom::fit_to_target(triangle_target(), o);
    auto poly = geom::boundary_polyline(geom::GaugeBody(r.net), 1024);
    CHECK(geom::convex_position(poly));
    CHECK(r.hausdorff <= 0.1);
}

TEST_CASE("preconditions: convex position and interior origin") {
    std::vector<std::array<double, 2>> bad = {{0, 0}, {1, 0}, {0.5, 0.1}, {0.5, 1}};
    CHECK_THROWS(geom::fit_to_target(bad, geom::FitOptions{}));
    // origin outside: shift a small circle away
    auto t = circle_target(64);
    for (auto& p : t) p[0] += 5.0;
    CHECK_THROWS(geom::fit_to_target(t, geom::FitOptions{}));
}
