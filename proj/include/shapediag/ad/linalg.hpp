#ifndef SHAPEDIAG_AD_LINALG_HPP
#define SHAPEDIAG_AD_LINALG_HPP

#include <Eigen/Dense>
#include <vector>

#include "shapediag/ad/tape.hpp"

namespace shapediag::ad {

// Dense matrix of tape scalars, row-major. Entries may alias (e.g. a
// symmetric matrix may reference each off-diagonal node twice); adjoints
// accumulate correctly through aliased entries.
struct DiffMatrix {
    int rows = 0, cols = 0;
    Tape* tape = nullptr;
    std::vector<int64_t> ix; // row-major node ids

    DiffMatrix() = default;
    DiffMatrix(int r, int c, Tape* t) : rows(r), cols(c), tape(t), ix(size_t(r) * c, -1) {}

    static DiffMatrix from(Tape& t, const Eigen::MatrixXd& m);       // leaf entries
    static DiffMatrix from(Tape& t, std::span<const Diff> entries, int rows, int cols);

    Diff operator()(int r, int c) const {
        int64_t id = ix[size_t(r) * cols + c];
        return Diff(tape->value(id), id, tape);
    }
    void set(int r, int c, const Diff& d) {
        tape->check_same(d);
        ix[size_t(r) * cols + c] = d.tape ? d.ix : tape->push_leaf(d.v);
    }

    Eigen::MatrixXd values() const;
};

struct NotPositiveDefinite : std::runtime_error {
    NotPositiveDefinite(int pivot)
        : std::runtime_error("not positive definite (pivot " + std::to_string(pivot) + ")"),
          pivot(pivot) {}
    int pivot;
};

// C = A * B
DiffMatrix matmul(const DiffMatrix& a, const DiffMatrix& b);

// A^-1 (square)
DiffMatrix inverse(const DiffMatrix& a);

// det(A) (square)
Diff determinant(const DiffMatrix& a);

// Lower Cholesky factor of SPD A; throws NotPositiveDefinite with the failing
// pivot index otherwise.
DiffMatrix cholesky(const DiffMatrix& a);

// Eigenvalues of symmetric A in nondecreasing order. Adjoint of lambda_i is
// v_i v_i^T; eigenvalues closer than cluster_gap * spectral_radius share the
// summed cluster adjoint (smooth through crossings of symmetric functions).
// Primal eigenvectors are written to vecs_out when non-null (not
// differentiable).
std::vector<Diff> sym_eig(const DiffMatrix& a, Eigen::MatrixXd* vecs_out = nullptr,
                          double cluster_gap = 1e-8);

// Least squares argmin_x |A x - b|, rows >= cols, full column rank. b is a
// column (m x 1). Throws std::runtime_error on rank deficiency.
DiffMatrix lstsq(const DiffMatrix& a, const DiffMatrix& b);

// Singular values in nonincreasing order, cluster rule as for sym_eig.
std::vector<Diff> singular_values(const DiffMatrix& a, double cluster_gap = 1e-8);

// Plain-double overloads so code templated on the scalar type can run a
// primal-only pass with the same call sites.
inline Eigen::MatrixXd matmul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a * b; }
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a);
std::vector<double> sym_eig(const Eigen::MatrixXd& a, Eigen::MatrixXd* vecs_out = nullptr,
                            double cluster_gap = 1e-8);
Eigen::MatrixXd lstsq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
std::vector<double> singular_values(const Eigen::MatrixXd& a, double cluster_gap = 1e-8);

} // namespace shapediag::ad

#endif
