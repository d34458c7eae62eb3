#include <doctest.h>

#include "shapediag/ad/linalg.hpp"
#include "shapediag/util/rng.hpp"

using namespace shapediag;
using ad::Diff;
using ad::DiffMatrix;
using ad::Tape;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

// well-conditioned SPD with distinct eigenvalues
Eigen::MatrixXd random_spd(Rng& rng, int n) {
    Eigen::MatrixXd a = random_matrix(rng, n, n);
    Eigen::MatrixXd m = a * a.transpose();
    for (int i = 0; i < n; ++i) m(i, i) += 1.0 + 0.35 * i;
    return m;
}

// FD of a fixed random contraction of `op` on entries of `a0`
template <class Op>
void check_matrix_grad(Rng& rng, const Eigen::MatrixXd& a0, Op op, double tol = 1e-5,
                       double step = 1e-5) {
    Tape t;
    DiffMatrix a = DiffMatrix::from(t, a0);
    Diff f = op(t, a);
    t.backward(f.ix);
    std::vector<double> grad(a.ix.size());
    for (size_t k = 0; k < a.ix.size(); ++k) grad[k] = t.adjoint(a.ix[k]);

    double scale = 0.0;
    for (double g : grad) scale = std::max(scale, std::fabs(g));
    for (size_t k = 0; k < a.ix.size(); ++k) {
        Eigen::MatrixXd ap = a0, am = a0;
        ap(int(k) / a0.cols(), int(k) % a0.cols()) += step;
        am(int(k) / a0.cols(), int(k) % a0.cols()) -= step;
        Tape tp, tm;
        DiffMatrix dp = DiffMatrix::from(tp, ap), dm = DiffMatrix::from(tm, am);
        double fd = (op(tp, dp).v - op(tm, dm).v) / (2 * step);
        CHECK(grad[k] == doctest::Approx(fd).epsilon(tol).scale(std::max(scale, 1.0)));
    }
}

std::vector<double> contraction_weights(Rng& rng, size_t n) {
    std::vector<double> w(n);
    for (auto& v : w) v = rng.uniform(-1.0, 1.0);
    return w;
}

Diff contract(const DiffMatrix& m, const std::vector<double>& w) {
    std::vector<Diff> entries;
    entries.reserve(m.ix.size());
    for (size_t k = 0; k < m.ix.size(); ++k)
        entries.push_back(Diff(m.tape->value(m.ix[k]), m.ix[k], m.tape));
    return ad::wsum(entries, w);
}

} // namespace

TEST_CASE("primals match Eigen to 1e-12 relative") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + int(rng.uniform_int(0, 3));
        Eigen::MatrixXd a0 = random_spd(rng, n);
        Tape t;
        DiffMatrix a = DiffMatrix::from(t, a0);
        CHECK((ad::inverse(a).values() - a0.inverse()).norm() <= 1e-12 * a0.inverse().norm());
        CHECK(ad::determinant(a).v == doctest::Approx(a0.determinant()).epsilon(1e-12));
        Eigen::LLT<Eigen::MatrixXd> llt(a0);
        Eigen::MatrixXd lref = llt.matrixL();
        CHECK((ad::cholesky(a).values() - lref).norm() <= 1e-12 * lref.norm());
        Eigen::MatrixXd b0 = random_matrix(rng, n, n);
        DiffMatrix b = DiffMatrix::from(t, b0);
        CHECK((ad::matmul(a, b).values() - a0 * b0).norm() <= 1e-12 * (a0 * b0).norm());
    }
}

TEST_CASE("sym_eig: order, reconstruction, diagonal case") {
    Rng rng(7);
    Eigen::MatrixXd d = Eigen::Vector2d(1.0, 2.0).asDiagonal();
    Tape t;
    DiffMatrix a = DiffMatrix::from(t, d);
    Eigen::MatrixXd vecs;
    auto ev = ad::sym_eig(a, &vecs);
    CHECK(ev[0].v == doctest::Approx(1.0));
    CHECK(ev[1].v == doctest::Approx(2.0));
    // gradient of the smallest eigenvalue = e1 e1^T
    t.backward(ev[0].ix);
    CHECK(t.adjoint(a.ix[0]) == doctest::Approx(1.0));
    CHECK(t.adjoint(a.ix[1]) == doctest::Approx(0.0));
    CHECK(t.adjoint(a.ix[3]) == doctest::Approx(0.0));

    for (int trial = 0; trial < 10; ++trial) {
        int n = 3 + int(rng.uniform_int(0, 2));
        Eigen::MatrixXd s = random_spd(rng, n);
        Tape t2;
        Eigen::MatrixXd v2;
        auto vals = ad::sym_eig(DiffMatrix::from(t2, s), &v2);
        for (size_t i = 1; i < vals.size(); ++i) CHECK(vals[i - 1].v <= vals[i].v);
        Eigen::VectorXd lam(n);
        for (int i = 0; i < n; ++i) lam(i) = vals[i].v;
        CHECK((v2 * lam.asDiagonal() * v2.transpose() - s).norm() <= 1e-10 * s.norm());
    }
}

TEST_CASE("cholesky rejects non-SPD input with the pivot index") {
    Tape t;
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0; // indefinite
    bool threw = false;
    try {
        ad::cholesky(DiffMatrix::from(t, bad));
    } catch (const ad::NotPositiveDefinite& e) {
        threw = true;
        CHECK(e.pivot == 1);
        CHECK(std::string(e.what()).find("not positive definite") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("cholesky identity") {
    Tape t;
    DiffMatrix a = DiffMatrix::from(t, Eigen::MatrixXd::Identity(3, 3));
    CHECK((ad::cholesky(a).values() - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-15);
}

TEST_CASE("lstsq tiny example and FD adjoint") {
    Tape t;
    Eigen::MatrixXd a0(2, 1);
    a0 << 1.0, 1.0;
    Eigen::MatrixXd b0(2, 1);
    b0 << 0.0, 2.0;
    DiffMatrix a = DiffMatrix::from(t, a0), b = DiffMatrix::from(t, b0);
    DiffMatrix x = ad::lstsq(a, b);
    CHECK(x.values()(0, 0) == doctest::Approx(1.0));

    // adjoint vs FD through both A and b
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        int m = 6, n = 3;
        Eigen::MatrixXd am = random_matrix(rng, m, n);
        for (int i = 0; i < n; ++i) am(i, i) += 2.0;
        Eigen::MatrixXd bm = random_matrix(rng, m, 1);
        auto w = contraction_weights(rng, size_t(n));
        // gradient w.r.t. A
        check_matrix_grad(rng, am, [&](Tape& tt, DiffMatrix& aa) {
            DiffMatrix bb = DiffMatrix::from(tt, bm);
            return contract(ad::lstsq(aa, bb), w);
        }, 1e-6);
        // gradient w.r.t. b
        check_matrix_grad(rng, bm, [&](Tape& tt, DiffMatrix& bb) {
            DiffMatrix aa = DiffMatrix::from(tt, am);
            return contract(ad::lstsq(aa, bb), w);
        }, 1e-6);
    }
}

TEST_CASE("lstsq rejects rank-deficient input") {
    Tape t;
    Eigen::MatrixXd a0(4, 2);
    a0 << 1, 2, 2, 4, 3, 6, 4, 8;
    Eigen::MatrixXd b0(4, 1);
    b0 << 1, 1, 1, 1;
    CHECK_THROWS_AS(ad::lstsq(DiffMatrix::from(t, a0), DiffMatrix::from(t, b0)),
                    std::runtime_error);
}

TEST_CASE("reverse gradients match central differences over random trials") {
    Rng rng(23);
    int trials = 0;
    while (trials < 100) {
        int n = 2 + int(rng.uniform_int(0, 2));
        Eigen::MatrixXd spd = random_spd(rng, n);
        auto w = contraction_weights(rng, size_t(n) * n);
        auto wv = contraction_weights(rng, size_t(n));
        int which = trials % 5;
        switch (which) {
            case 0:
                check_matrix_grad(rng, spd, [&](Tape& t, DiffMatrix& a) {
                    return contract(ad::inverse(a), w);
                });
                break;
            case 1:
                check_matrix_grad(rng, spd, [&](Tape& t, DiffMatrix& a) {
                    return ad::determinant(a) * Diff(0.3);
                });
                break;
            case 2:
                check_matrix_grad(rng, spd, [&](Tape& t, DiffMatrix& a) {
                    return contract(ad::cholesky(a), w);
                });
                break;
            case 3:
                check_matrix_grad(rng, spd, [&](Tape& t, DiffMatrix& a) {
                    auto ev = ad::sym_eig(a);
                    return ad::wsum(ev, wv);
                });
                break;
            case 4: {
                Eigen::MatrixXd g = random_matrix(rng, n, n) + 3.0 * Eigen::MatrixXd::Identity(n, n);
                check_matrix_grad(rng, g, [&](Tape& t, DiffMatrix& a) {
                    auto sv = ad::singular_values(a);
                    return ad::wsum(sv, wv);
                });
                break;
            }
        }
        ++trials;
    }
}

TEST_CASE("matmul adjoint vs FD including rectangular shapes") {
    Rng rng(31);
    Eigen::MatrixXd a0 = random_matrix(rng, 3, 4);
    Eigen::MatrixXd b0 = random_matrix(rng, 4, 2);
    auto w = contraction_weights(rng, 6);
    check_matrix_grad(rng, a0, [&](Tape& t, DiffMatrix& a) {
        DiffMatrix b = DiffMatrix::from(t, b0);
        return contract(ad::matmul(a, b), w);
    });
    check_matrix_grad(rng, b0, [&](Tape& t, DiffMatrix& b) {
        DiffMatrix a = DiffMatrix::from(t, a0);
        return contract(ad::matmul(a, b), w);
    });
}

TEST_CASE("degenerate eigenvalues use the cluster-sum rule") {
    // on I2 the eigenvalues tie; the cluster rule spreads the summed adjoint,
    // so d(l1+l2) = I exactly and d(l1) alone = I/2
    Tape t;
    DiffMatrix a = DiffMatrix::from(t, Eigen::MatrixXd::Identity(2, 2));
    auto ev = ad::sym_eig(a);
    Diff sum = ev[0] + ev[1];
    t.backward(sum.ix);
    CHECK(t.adjoint(a.ix[0]) == doctest::Approx(1.0));
    CHECK(t.adjoint(a.ix[3]) == doctest::Approx(1.0));
    CHECK(t.adjoint(a.ix[1]) == doctest::Approx(0.0));
    t.backward(ev[0].ix);
    CHECK(t.adjoint(a.ix[0]) == doctest::Approx(0.5));
}
