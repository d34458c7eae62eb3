#include <doctest.h>

#include "shapediag/baseline/valtr.hpp"
#include "shapediag/util/rng.hpp"

using namespace shapediag;
using baseline::ConvexPolygon;
using diagram::DiagramId;

namespace {
constexpr double kPi = 3.14159265358979323846;

// classical series: T(square side a) = (a^4/4)(1/3 - (64/pi^5) sum tanh(n pi/2)/n^5)
double square_torsion(double side) {
    double sum = 0.0;
    for (int n = 1; n < 400; n += 2) sum += std::tanh(n * kPi / 2.0) / std::pow(double(n), 5.0);
    return std::pow(side, 4.0) / 4.0 * (1.0 / 3.0 - 64.0 / std::pow(kPi, 5.0) * sum);
}
} // namespace

TEST_CASE("triangles are convex; n=3 total construction") {
    for (uint64_t seed = 0; seed < 50; ++seed)
        CHECK(baseline::valtr_polygon(3, seed).strictly_convex());
}

TEST_CASE("10^4 valtr polygons with n=20 all pass strict convexity") {
    int pass = 0;
    for (int k = 0; k < 10000; ++k) {
        auto p = baseline::valtr_polygon(20, uint64_t(k));
        if (p.strictly_convex()) ++pass;
        if (k < 100) {
            // unit-square containment
            for (auto& v : p.vertices) {
                CHECK(v[0] >= -1e-12);
                CHECK(v[0] <= 1.0 + 1e-12);
                CHECK(v[1] >= -1e-12);
                CHECK(v[1] <= 1.0 + 1e-12);
            }
        }
    }
    CHECK(pass == 10000);
}

TEST_CASE("fixed seed reproduces the polygon bitwise") {
    auto a = baseline::valtr_polygon(17, 42);
    auto b = baseline::valtr_polygon(17, 42);
    REQUIRE(a.vertices.size() == b.vertices.size());
    for (size_t i = 0; i < a.vertices.size(); ++i) {
        CHECK(a.vertices[i][0] == b.vertices[i][0]);
        CHECK(a.vertices[i][1] == b.vertices[i][1]);
    }
}

TEST_CASE("shoelace on the standard triangle") {
    ConvexPolygon t;
    t.vertices = {{0, 0}, {1, 0}, {0, 1}};
    CHECK(t.area() == 0.5);
}

TEST_CASE("unit square functionals: vol=1, per=4, W=1/6") {
    ConvexPolygon sq;
    sq.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    auto f = baseline::polygon_functionals(sq);
    CHECK(f.vol == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.per == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(f.w == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("regular 4096-gon approaches the disk to 1e-5 relative") {
    ConvexPolygon p;
    for (int k = 0; k < 4096; ++k) {
        double a = 2.0 * kPi * k / 4096;
        p.vertices.push_back({std::cos(a), std::sin(a)});
    }
    auto f = baseline::polygon_functionals(p);
    CHECK(f.vol == doctest::Approx(kPi).epsilon(1e-5));
    CHECK(f.per == doctest::Approx(2.0 * kPi).epsilon(1e-5));
}

TEST_CASE("W is translation invariant to 1e-12") {
    auto p = baseline::valtr_polygon(12, 7);
    auto f0 = baseline::polygon_functionals(p);
    ConvexPolygon moved = p;
    for (auto& v : moved.vertices) {
        v[0] += 3.7;
        v[1] -= 2.9;
    }
    auto f1 = baseline::polygon_functionals(moved);
    CHECK(f1.w == doctest::Approx(f0.w).epsilon(1e-12));
}

TEST_CASE("polygon torsion: square against the series oracle within 2%") {
    ConvexPolygon sq;
    sq.vertices = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    auto f = baseline::polygon_functionals(sq, true);
    REQUIRE(f.t.has_value());
    CHECK(*f.t == doctest::Approx(square_torsion(2.0)).epsilon(2e-2));
}

TEST_CASE("10^3 unit squares map to (3/pi, pi/4) on VPW2") {
    for (int k = 0; k < 1000; ++k) {
        ConvexPolygon sq;
        sq.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        auto f = baseline::polygon_functionals(sq);
        diagram::FunctionalSet<double> set;
        set.vol = f.vol;
        set.per = f.per;
        set.w = f.w;
        double x, y;
        diagram::compose(DiagramId::VPW2, set, x, y);
        CHECK(x == doctest::Approx(3.0 / kPi).epsilon(1e-12));
        CHECK(y == doctest::Approx(kPi / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("monte carlo VPW2: points satisfy the Polya bound") {
    auto mc = baseline::monte_carlo_diagram(DiagramId::VPW2, 2000, 5);
    CHECK(mc.skipped == 0);
    CHECK(mc.points.size() == 2000);
    for (auto& [x, y] : mc.points) {
        CHECK(y < kPi * kPi / 6.0 * x + 0.02);
        CHECK(x <= 1.0 + 1e-9);
        CHECK(y <= 1.0 + 1e-9);
    }
}

TEST_CASE("monte carlo VPT2: makai/polya band within MFS tolerance") {
    auto mc = baseline::monte_carlo_diagram(DiagramId::VPT2, 60, 9, 3, 12);
    CHECK(mc.skipped == 0);
    for (auto& [x, y] : mc.points) {
        CHECK(y >= 2.0 / 3.0 * x * x - 0.02);
        CHECK(y <= 4.0 / 3.0 * x * x + 0.02);
    }
}

TEST_CASE("sample count 0 gives an empty cloud without error") {
    auto mc = baseline::monte_carlo_diagram(DiagramId::VPW2, 0, 1);
    CHECK(mc.points.empty());
    CHECK(mc.skipped == 0);
}

TEST_CASE("occupied cell counting") {
    std::vector<std::pair<double, double>> pts = {{0.01, 0.01}, {0.011, 0.012}, {0.99, 0.99},
                                                  {-0.5, 0.5}};
    CHECK(baseline::occupied_cells(pts, 50) == 2); // duplicate cell + out-of-range dropped
}
