#include "shapediag/ad/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace shapediag::ad {

namespace {

Eigen::MatrixXd gather_adjoint(const Tape& t, const std::vector<int64_t>& out, int rows, int cols) {
    Eigen::MatrixXd g(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) g(r, c) = t.adjoint(out[size_t(r) * cols + c]);
    return g;
}

void scatter_add(Tape& t, const std::vector<int64_t>& ids, const Eigen::MatrixXd& g) {
    for (int r = 0; r < g.rows(); ++r)
        for (int c = 0; c < g.cols(); ++c) t.adjoint_mut(ids[size_t(r) * g.cols() + c]) += g(r, c);
}

DiffMatrix wrap_outputs(Tape& t, const Eigen::MatrixXd& m) {
    std::vector<double> vals(size_t(m.rows()) * m.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) vals[size_t(r) * m.cols() + c] = m(r, c);
    int64_t first = t.push_mat_outputs(vals);
    DiffMatrix d(int(m.rows()), int(m.cols()), &t);
    for (size_t k = 0; k < vals.size(); ++k) d.ix[k] = first + int64_t(k);
    return d;
}

// clusters of near-equal values (input sorted); gap relative to max |value|
std::vector<std::pair<int, int>> clusters(const Eigen::VectorXd& v, double rel_gap) {
    double scale = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<std::pair<int, int>> cl;
    int begin = 0;
    for (int i = 1; i <= v.size(); ++i) {
        if (i == v.size() || std::abs(v(i) - v(i - 1)) > rel_gap * scale) {
            cl.emplace_back(begin, i);
            begin = i;
        }
    }
    return cl;
}

} // namespace

DiffMatrix DiffMatrix::from(Tape& t, const Eigen::MatrixXd& m) {
    DiffMatrix d(int(m.rows()), int(m.cols()), &t);
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) d.ix[size_t(r) * m.cols() + c] = t.push_leaf(m(r, c));
    return d;
}

DiffMatrix DiffMatrix::from(Tape& t, std::span<const Diff> entries, int rows, int cols) {
    assert(int64_t(entries.size()) == int64_t(rows) * cols);
    DiffMatrix d(rows, cols, &t);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) d.set(r, c, entries[size_t(r) * cols + c]);
    return d;
}

Eigen::MatrixXd DiffMatrix::values() const {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = tape->value(ix[size_t(r) * cols + c]);
    return m;
}

// ---------------------------------------------------------------- matmul

namespace {
struct MatmulRec final : MatRec {
    std::vector<int64_t> a_ix, b_ix;
    Eigen::MatrixXd a, b;
    void backward(Tape& t) const override {
        Eigen::MatrixXd g = gather_adjoint(t, outs, int(a.rows()), int(b.cols()));
        scatter_add(t, a_ix, g * b.transpose());
        scatter_add(t, b_ix, a.transpose() * g);
    }
    const char* name() const override { return "matmul"; }
    std::vector<int64_t> outs;
};
} // namespace

DiffMatrix matmul(const DiffMatrix& a, const DiffMatrix& b) {
    assert(a.cols == b.rows);
    Tape& t = *a.tape;
    auto rec = std::make_unique<MatmulRec>();
    rec->a = a.values();
    rec->b = b.values();
    rec->a_ix = a.ix;
    rec->b_ix = b.ix;
    DiffMatrix out = wrap_outputs(t, rec->a * rec->b);
    rec->outs = out.ix;
    rec->first_out = out.ix.front();
    rec->n_out = int64_t(out.ix.size());
    t.seal_mat_record(std::move(rec));
    return out;
}

// ---------------------------------------------------------------- inverse

namespace {
struct InverseRec final : MatRec {
    std::vector<int64_t> a_ix, outs;
    Eigen::MatrixXd inv;
    void backward(Tape& t) const override {
        Eigen::MatrixXd g = gather_adjoint(t, outs, int(inv.rows()), int(inv.cols()));
        scatter_add(t, a_ix, -inv.transpose() * g * inv.transpose());
    }
    const char* name() const override { return "inverse"; }
};
} // namespace

DiffMatrix inverse(const DiffMatrix& a) {
    assert(a.rows == a.cols);
    Tape& t = *a.tape;
    auto rec = std::make_unique<InverseRec>();
    rec->inv = a.values().partialPivLu().inverse();
    rec->a_ix = a.ix;
    DiffMatrix out = wrap_outputs(t, rec->inv);
    rec->outs = out.ix;
    rec->first_out = out.ix.front();
    rec->n_out = int64_t(out.ix.size());
    t.seal_mat_record(std::move(rec));
    return out;
}

// ------------------------------------------------------------ determinant

namespace {
struct DetRec final : MatRec {
    std::vector<int64_t> a_ix;
    Eigen::MatrixXd inv_t;
    double det;
    int64_t out;
    void backward(Tape& t) const override {
        double g = t.adjoint(out);
        if (g == 0.0) return;
        scatter_add(t, a_ix, (g * det) * inv_t);
    }
    const char* name() const override { return "determinant"; }
};
} // namespace

Diff determinant(const DiffMatrix& a) {
    assert(a.rows == a.cols);
    Tape& t = *a.tape;
    Eigen::MatrixXd av = a.values();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(av);
    auto rec = std::make_unique<DetRec>();
    rec->det = lu.determinant();
    rec->inv_t = lu.inverse().transpose();
    rec->a_ix = a.ix;
    double v = rec->det;
    int64_t first = t.push_mat_outputs(std::span<const double>(&v, 1));
    rec->out = first;
    rec->first_out = first;
    rec->n_out = 1;
    t.seal_mat_record(std::move(rec));
    return Diff(v, first, &t);
}

// --------------------------------------------------------------- cholesky

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a) {
    int n = int(a.rows());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j) - L.row(j).head(j).squaredNorm();
        if (!(d > 0.0)) throw NotPositiveDefinite(j);
        L(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i)
            L(i, j) = (a(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
    }
    return L;
}

namespace {
// Murray (2016): with P = Phi(L^T Lbar) (lower triangle, halved diagonal),
// Abar = L^-T (P + P^T)/2 L^-1 as the full-matrix (symmetric) adjoint.
struct CholRec final : MatRec {
    std::vector<int64_t> a_ix, outs;
    Eigen::MatrixXd L;
    void backward(Tape& t) const override {
        int n = int(L.rows());
        Eigen::MatrixXd lbar = gather_adjoint(t, outs, n, n);
        // upper-triangle outputs are structural zeros; their adjoints do not
        // propagate
        lbar = lbar.triangularView<Eigen::Lower>();
        Eigen::MatrixXd m = L.transpose() * lbar;
        Eigen::MatrixXd p = m.triangularView<Eigen::Lower>();
        p.diagonal() *= 0.5;
        Eigen::MatrixXd s = 0.5 * (p + p.transpose());
        Eigen::MatrixXd tmp = L.transpose().triangularView<Eigen::Upper>().solve(s);
        Eigen::MatrixXd abar =
            L.transpose().triangularView<Eigen::Upper>().solve(tmp.transpose()).transpose();
        scatter_add(t, a_ix, abar);
    }
    const char* name() const override { return "cholesky"; }
};
} // namespace

DiffMatrix cholesky(const DiffMatrix& a) {
    assert(a.rows == a.cols);
    Tape& t = *a.tape;
    auto rec = std::make_unique<CholRec>();
    // symmetrized read matches the symmetrized adjoint rule
    Eigen::MatrixXd av = a.values();
    rec->L = cholesky(Eigen::MatrixXd(0.5 * (av + av.transpose())));
    rec->a_ix = a.ix;
    DiffMatrix out = wrap_outputs(t, rec->L);
    rec->outs = out.ix;
    rec->first_out = out.ix.front();
    rec->n_out = int64_t(out.ix.size());
    t.seal_mat_record(std::move(rec));
    return out;
}

// ---------------------------------------------------------------- sym_eig

std::vector<double> sym_eig(const Eigen::MatrixXd& a, Eigen::MatrixXd* vecs_out,
                            double /*cluster_gap*/) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (vecs_out) *vecs_out = es.eigenvectors();
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
    return v;
}

namespace {
struct SymEigRec final : MatRec {
    std::vector<int64_t> a_ix, outs;
    Eigen::MatrixXd vecs;
    Eigen::VectorXd vals;
    double gap;
    void backward(Tape& t) const override {
        int n = int(vals.size());
        Eigen::VectorXd lbar(n);
        for (int i = 0; i < n; ++i) lbar(i) = t.adjoint(outs[i]);
        if (lbar.isZero(0.0)) return;
        Eigen::MatrixXd abar = Eigen::MatrixXd::Zero(n, n);
        for (auto [b, e] : clusters(vals, gap)) {
            double w = lbar.segment(b, e - b).sum() / double(e - b);
            if (w == 0.0) continue;
            for (int i = b; i < e; ++i) abar += w * (vecs.col(i) * vecs.col(i).transpose());
        }
        scatter_add(t, a_ix, abar);
    }
    const char* name() const override { return "sym_eig"; }
};
} // namespace

std::vector<Diff> sym_eig(const DiffMatrix& a, Eigen::MatrixXd* vecs_out, double cluster_gap) {
    assert(a.rows == a.cols);
    Tape& t = *a.tape;
    Eigen::MatrixXd av = a.values();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (av + av.transpose()));
    auto rec = std::make_unique<SymEigRec>();
    rec->vecs = es.eigenvectors();
    rec->vals = es.eigenvalues();
    rec->gap = cluster_gap;
    rec->a_ix = a.ix;
    if (vecs_out) *vecs_out = rec->vecs;
    std::vector<double> vals(rec->vals.data(), rec->vals.data() + a.rows);
    int64_t first = t.push_mat_outputs(vals);
    rec->outs.resize(vals.size());
    for (size_t k = 0; k < vals.size(); ++k) rec->outs[k] = first + int64_t(k);
    rec->first_out = first;
    rec->n_out = int64_t(vals.size());
    t.seal_mat_record(std::move(rec));
    std::vector<Diff> out;
    out.reserve(vals.size());
    for (size_t k = 0; k < vals.size(); ++k) out.emplace_back(vals[k], first + int64_t(k), &t);
    return out;
}

// ------------------------------------------------------------------ lstsq

Eigen::MatrixXd lstsq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < a.cols()) throw std::runtime_error("lstsq: rank-deficient matrix");
    return qr.solve(b);
}

namespace {
// x = (A^T A)^-1 A^T b; with z = (A^T A)^-1 xbar:
//   bbar = A z,   Abar = -(r z^T + (A z) x^T),  r = A x - b
struct LstsqRec final : MatRec {
    std::vector<int64_t> a_ix, b_ix, outs;
    Eigen::MatrixXd a, r_upper; // R factor of A = QR (n x n, upper)
    Eigen::VectorXd x, resid;
    void backward(Tape& t) const override {
        int n = int(x.size());
        Eigen::VectorXd xbar(n);
        for (int i = 0; i < n; ++i) xbar(i) = t.adjoint(outs[i]);
        if (xbar.isZero(0.0)) return;
        Eigen::VectorXd z = r_upper.triangularView<Eigen::Upper>().solve(
            r_upper.transpose().triangularView<Eigen::Lower>().solve(xbar));
        Eigen::VectorXd az = a * z;
        scatter_add(t, a_ix, -(resid * z.transpose() + az * x.transpose()));
        scatter_add(t, b_ix, az);
    }
    const char* name() const override { return "lstsq"; }
};
} // namespace

DiffMatrix lstsq(const DiffMatrix& a, const DiffMatrix& b) {
    assert(a.rows >= a.cols && b.cols == 1 && b.rows == a.rows);
    Tape& t = *a.tape;
    Eigen::MatrixXd av = a.values();
    Eigen::VectorXd bv = b.values();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(av);
    Eigen::MatrixXd r = qr.matrixQR().topRows(a.cols).triangularView<Eigen::Upper>();
    for (int j = 0; j < a.cols; ++j)
        if (std::abs(r(j, j)) < 1e-13 * std::abs(r(0, 0)))
            throw std::runtime_error("lstsq: rank-deficient matrix");
    auto rec = std::make_unique<LstsqRec>();
    rec->x = qr.solve(bv);
    rec->a = av;
    rec->r_upper = r;
    rec->resid = av * rec->x - bv;
    rec->a_ix = a.ix;
    rec->b_ix = b.ix;
    DiffMatrix out = wrap_outputs(t, rec->x);
    rec->outs = out.ix;
    rec->first_out = out.ix.front();
    rec->n_out = int64_t(out.ix.size());
    t.seal_mat_record(std::move(rec));
    return out;
}

// -------------------------------------------------------- singular values

std::vector<double> singular_values(const Eigen::MatrixXd& a, double /*cluster_gap*/) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    std::vector<double> v(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
    return v;
}

namespace {
struct SvdRec final : MatRec {
    std::vector<int64_t> a_ix, outs;
    Eigen::MatrixXd u, v;
    Eigen::VectorXd sv;
    double gap;
    void backward(Tape& t) const override {
        int k = int(sv.size());
        Eigen::VectorXd sbar(k);
        for (int i = 0; i < k; ++i) sbar(i) = t.adjoint(outs[i]);
        if (sbar.isZero(0.0)) return;
        Eigen::MatrixXd abar = Eigen::MatrixXd::Zero(u.rows(), v.rows());
        for (auto [b, e] : clusters(sv, gap)) {
            double w = sbar.segment(b, e - b).sum() / double(e - b);
            if (w == 0.0) continue;
            for (int i = b; i < e; ++i) abar += w * (u.col(i) * v.col(i).transpose());
        }
        scatter_add(t, a_ix, abar);
    }
    const char* name() const override { return "singular_values"; }
};
} // namespace

std::vector<Diff> singular_values(const DiffMatrix& a, double cluster_gap) {
    Tape& t = *a.tape;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.values(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    auto rec = std::make_unique<SvdRec>();
    rec->u = svd.matrixU();
    rec->v = svd.matrixV();
    rec->sv = svd.singularValues();
    rec->gap = cluster_gap;
    rec->a_ix = a.ix;
    std::vector<double> vals(rec->sv.data(), rec->sv.data() + rec->sv.size());
    int64_t first = t.push_mat_outputs(vals);
    rec->outs.resize(vals.size());
    for (size_t k = 0; k < vals.size(); ++k) rec->outs[k] = first + int64_t(k);
    rec->first_out = first;
    rec->n_out = int64_t(vals.size());
    t.seal_mat_record(std::move(rec));
    std::vector<Diff> out;
    out.reserve(vals.size());
    for (size_t k = 0; k < vals.size(); ++k) out.emplace_back(vals[k], first + int64_t(k), &t);
    return out;
}

} // namespace shapediag::ad
