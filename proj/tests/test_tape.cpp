#include <doctest.h>

#include "shapediag/ad/tape.hpp"
#include "shapediag/util/rng.hpp"

using namespace shapediag;
using ad::Diff;
using ad::Tape;

TEST_CASE("polynomial gradient: f(x)=x^2 at x=3") {
    Tape t;
    Diff x = t.input(3.0);
    Diff f = x * x;
    auto g = ad::grad(f, std::vector<Diff>{x});
    CHECK(f.v == doctest::Approx(9.0));
    CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("scalar ops against central differences") {
    // composite expression exercising every scalar op
    auto fn = [](auto x, auto y) {
        using ad::abs;
        using ad::exp;
        using ad::log;
        using ad::max;
        using ad::min;
        using ad::pow;
        using ad::sqrt;
        auto a = exp(x * 0.3) + log(y + 2.5);
        auto b = sqrt(x * x + y * y + 1.0);
        auto c = max(x, y) - min(x * 0.5, y) + abs(x - 0.1);
        auto d = pow(y + 3.0, 1.7) / b + ad::sin(x) * ad::cos(y);
        return a * b + c * d;
    };
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        double xv = rng.uniform(-1.5, 1.5), yv = rng.uniform(-1.5, 1.5);
        if (std::fabs(xv - yv) < 1e-3 || std::fabs(xv * 0.5 - yv) < 1e-3 ||
            std::fabs(xv - 0.1) < 1e-3)
            continue; // keep clear of the max/min/abs kinks
        Tape t;
        Diff x = t.input(xv), y = t.input(yv);
        Diff f = fn(x, y);
        auto g = ad::grad(f, std::vector<Diff>{x, y});
        const double h = 1e-6;
        double fx1 = fn(xv + h, yv), fx0 = fn(xv - h, yv);
        double fy1 = fn(xv, yv + h), fy0 = fn(xv, yv - h);
        CHECK(g[0] == doctest::Approx((fx1 - fx0) / (2 * h)).epsilon(1e-5));
        CHECK(g[1] == doctest::Approx((fy1 - fy0) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("wsum, dot and logsumexp records") {
    Tape t;
    std::vector<Diff> xs = {t.input(1.0), t.input(-2.0), t.input(0.5)};
    std::vector<double> cs = {2.0, 3.0, -1.0};
    Diff w = ad::wsum(xs, cs, 0.25);
    CHECK(w.v == doctest::Approx(2.0 - 6.0 - 0.5 + 0.25));
    t.backward(w.ix);
    CHECK(t.adjoint(xs[0].ix) == doctest::Approx(2.0));
    CHECK(t.adjoint(xs[1].ix) == doctest::Approx(3.0));
    CHECK(t.adjoint(xs[2].ix) == doctest::Approx(-1.0));

    std::vector<Diff> ys = {t.input(0.5), t.input(1.5), t.input(-0.5)};
    Diff d = ad::dot(xs, ys);
    t.backward(d.ix);
    CHECK(d.v == doctest::Approx(0.5 - 3.0 - 0.25));
    CHECK(t.adjoint(xs[1].ix) == doctest::Approx(1.5));
    CHECK(t.adjoint(ys[1].ix) == doctest::Approx(-2.0));

    double sm[3];
    Diff l = ad::logsumexp(std::span<const Diff>(xs), sm);
    double ref = std::log(std::exp(1.0) + std::exp(-2.0) + std::exp(0.5));
    CHECK(l.v == doctest::Approx(ref).epsilon(1e-14));
    CHECK(sm[0] + sm[1] + sm[2] == doctest::Approx(1.0).epsilon(1e-14));
    t.backward(l.ix);
    CHECK(t.adjoint(xs[0].ix) == doctest::Approx(sm[0]).epsilon(1e-12));
}

TEST_CASE("replay determinism is bit-identical") {
    auto build = [](Tape& t, std::vector<double>& vals) {
        Diff x = t.input(0.773), y = t.input(-1.31);
        Diff f = ad::exp(x * y) + ad::sqrt(y * y + ad::Diff(2.0)) / (x + 3.0);
        t.backward(f.ix);
        vals = {f.v, t.adjoint(x.ix), t.adjoint(y.ix)};
    };
    Tape t1, t2;
    std::vector<double> a, b;
    build(t1, a);
    build(t2, b);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]); // exact bits
}

TEST_CASE("non-finite adjoint names the op kind") {
    Tape t;
    Diff x = t.input(0.0);
    Diff f = ad::log(x); // value -inf; partial 1/0 = inf
    bool threw = false;
    try {
        t.backward(f.ix);
    } catch (const ad::NonFiniteAdjoint& e) {
        threw = true;
        CHECK(std::string(e.what()).find("log") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("constants never touch the tape") {
    Tape t;
    Diff x = t.input(2.0);
    int64_t before = t.size();
    Diff c = Diff(3.0) * Diff(4.0) + Diff(1.0);
    CHECK(c.is_const());
    CHECK(t.size() == before);
    Diff f = x * c;
    t.backward(f.ix);
    CHECK(t.adjoint(x.ix) == doctest::Approx(13.0));
}
