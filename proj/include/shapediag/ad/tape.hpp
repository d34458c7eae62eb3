#ifndef SHAPEDIAG_AD_TAPE_HPP
#define SHAPEDIAG_AD_TAPE_HPP

#include <cassert>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapediag::ad {

class Tape;

// Operation kinds, kept per node so that a non-finite adjoint can name its
// originating operation.
enum class Op : uint8_t {
    Leaf, Add, Sub, Mul, Div, Neg, Exp, Log, Sqrt, Abs, Max, Min, PowConst,
    Sin, Cos, Axpy, WSum, Dot, Custom, MatOut
};

const char* op_name(Op op);

struct NonFiniteAdjoint : std::runtime_error {
    NonFiniteAdjoint(Op op, int64_t node)
        : std::runtime_error("non-finite adjoint at node " + std::to_string(node) +
                             " (op " + op_name(op) + ")"),
          op(op), node(node) {}
    Op op;
    int64_t node;
};

// A scalar on a Tape. tape == nullptr means a plain constant; arithmetic on
// constants does not touch any tape.
struct Diff {
    double v = 0.0;
    int64_t ix = -1;
    Tape* tape = nullptr;

    Diff() = default;
    /*implicit*/ Diff(double value) : v(value) {}
    Diff(double value, int64_t index, Tape* t) : v(value), ix(index), tape(t) {}

    bool is_const() const { return tape == nullptr; }
};

// Base for recorded matrix operations (see linalg.hpp). The record owns
// whatever primal data its adjoint rule needs.
struct MatRec {
    virtual ~MatRec() = default;
    // Scatter-add input adjoints given final output adjoints.
    virtual void backward(Tape& t) const = 0;
    virtual const char* name() const = 0;
    int64_t first_out = -1;
    int64_t n_out = 0;
};

// Append-only record of a scalar computation. Nodes are stored in topological
// order by construction; replaying identical inputs reproduces values
// bit-for-bit because every recorded operation is a deterministic function of
// earlier nodes.
class Tape {
public:
    struct Rec {
        int64_t a = -1, b = -1;   // parent node ids, -1 = none
        double da = 0.0, db = 0.0; // local partials
    };

    // --- construction of nodes ---

    Diff input(double v) { return Diff(v, push_leaf(v), this); }

    // Promote a constant to a node on this tape (leaf; no gradient requested).
    Diff lift(const Diff& d) {
        if (d.tape) {
            check_same(d);
            return d;
        }
        return Diff(d.v, push_leaf(d.v), this);
    }

    int64_t push_leaf(double v) {
        val_.push_back(v);
        rec_.push_back(Rec{});
        op_.push_back(Op::Leaf);
        return static_cast<int64_t>(val_.size()) - 1;
    }

    int64_t push1(Op op, double v, int64_t a, double da) {
        val_.push_back(v);
        rec_.push_back(Rec{a, -1, da, 0.0});
        op_.push_back(op);
        return static_cast<int64_t>(val_.size()) - 1;
    }

    int64_t push2(Op op, double v, int64_t a, int64_t b, double da, double db) {
        val_.push_back(v);
        rec_.push_back(Rec{a, b, da, db});
        op_.push_back(op);
        return static_cast<int64_t>(val_.size()) - 1;
    }

    // n-ary node: val = f(inputs), with caller-supplied partials.
    int64_t push_nary(Op op, double v, std::span<const int64_t> ids,
                      std::span<const double> partials) {
        assert(ids.size() == partials.size());
        int64_t off = static_cast<int64_t>(nary_ids_.size());
        nary_ids_.insert(nary_ids_.end(), ids.begin(), ids.end());
        nary_part_.insert(nary_part_.end(), partials.begin(), partials.end());
        val_.push_back(v);
        rec_.push_back(Rec{kNaryTag, static_cast<int64_t>(nary_.size()), 0.0, 0.0});
        op_.push_back(op);
        nary_.push_back(NaryRec{off, static_cast<int64_t>(ids.size())});
        return static_cast<int64_t>(val_.size()) - 1;
    }

    // Register a matrix record; outputs must be allocated by the caller with
    // push_mat_outputs *before* sealing the record.
    int64_t push_mat_outputs(std::span<const double> values) {
        int64_t first = static_cast<int64_t>(val_.size());
        for (double v : values) {
            val_.push_back(v);
            rec_.push_back(Rec{});
            op_.push_back(Op::MatOut);
        }
        return first;
    }

    void seal_mat_record(std::unique_ptr<MatRec> r) {
        assert(r->first_out >= 0 && r->n_out > 0);
        // tag the first output so the backward sweep triggers the record once
        rec_[r->first_out].a = kMatTag;
        rec_[r->first_out].b = static_cast<int64_t>(mat_.size());
        mat_.push_back(std::move(r));
    }

    // --- evaluation / differentiation ---

    double value(int64_t ix) const { return val_[ix]; }
    int64_t size() const { return static_cast<int64_t>(val_.size()); }

    // Reverse sweep from `seed` (adjoint 1). Adjoints for every node are
    // available through adjoint() afterwards. Throws NonFiniteAdjoint if a
    // non-finite adjoint is produced.
    void backward(int64_t seed);

    // Reverse sweep with several seeded outputs (node id, adjoint weight).
    void backward_multi(std::span<const std::pair<int64_t, double>> seeds);

    double adjoint(int64_t ix) const { return adj_[ix]; }
    double& adjoint_mut(int64_t ix) { return adj_[ix]; }

    // Drop all nodes but keep allocated capacity.
    void clear() {
        val_.clear(); rec_.clear(); op_.clear();
        nary_.clear(); nary_ids_.clear(); nary_part_.clear();
        mat_.clear();
        adj_.clear();
    }

    void check_same(const Diff& d) const {
        if (d.tape && d.tape != this)
            throw std::logic_error("operands live on different tapes");
    }

    static constexpr int64_t kNaryTag = -2;
    static constexpr int64_t kMatTag = -3;

private:
    struct NaryRec { int64_t off, n; };

    void sweep(int64_t top);

    std::vector<double> val_;
    std::vector<Rec> rec_;
    std::vector<Op> op_;
    std::vector<NaryRec> nary_;
    std::vector<int64_t> nary_ids_;
    std::vector<double> nary_part_;
    std::vector<std::unique_ptr<MatRec>> mat_;
    std::vector<double> adj_;
};

// gradient of a scalar loss with respect to chosen parameter nodes
std::vector<double> grad(const Diff& loss, std::span<const Diff> params);

// --- arithmetic ---

namespace detail {
inline Tape* tape_of(const Diff& a, const Diff& b) {
    if (a.tape && b.tape) {
        a.tape->check_same(b);
        return a.tape;
    }
    return a.tape ? a.tape : b.tape;
}
} // namespace detail

inline Diff operator+(const Diff& a, const Diff& b) {
    Tape* t = detail::tape_of(a, b);
    double v = a.v + b.v;
    if (!t) return Diff(v);
    if (!a.tape) return Diff(v, t->push1(Op::Add, v, b.ix, 1.0), t);
    if (!b.tape) return Diff(v, t->push1(Op::Add, v, a.ix, 1.0), t);
    return Diff(v, t->push2(Op::Add, v, a.ix, b.ix, 1.0, 1.0), t);
}

inline Diff operator-(const Diff& a, const Diff& b) {
    Tape* t = detail::tape_of(a, b);
    double v = a.v - b.v;
    if (!t) return Diff(v);
    if (!a.tape) return Diff(v, t->push1(Op::Sub, v, b.ix, -1.0), t);
    if (!b.tape) return Diff(v, t->push1(Op::Sub, v, a.ix, 1.0), t);
    return Diff(v, t->push2(Op::Sub, v, a.ix, b.ix, 1.0, -1.0), t);
}

inline Diff operator-(const Diff& a) {
    if (!a.tape) return Diff(-a.v);
    return Diff(-a.v, a.tape->push1(Op::Neg, -a.v, a.ix, -1.0), a.tape);
}

inline Diff operator*(const Diff& a, const Diff& b) {
    Tape* t = detail::tape_of(a, b);
    double v = a.v * b.v;
    if (!t) return Diff(v);
    if (!a.tape) return Diff(v, t->push1(Op::Mul, v, b.ix, a.v), t);
    if (!b.tape) return Diff(v, t->push1(Op::Mul, v, a.ix, b.v), t);
    return Diff(v, t->push2(Op::Mul, v, a.ix, b.ix, b.v, a.v), t);
}

inline Diff operator/(const Diff& a, const Diff& b) {
    Tape* t = detail::tape_of(a, b);
    double v = a.v / b.v;
    if (!t) return Diff(v);
    if (!a.tape) return Diff(v, t->push1(Op::Div, v, b.ix, -v / b.v), t);
    if (!b.tape) return Diff(v, t->push1(Op::Div, v, a.ix, 1.0 / b.v), t);
    return Diff(v, t->push2(Op::Div, v, a.ix, b.ix, 1.0 / b.v, -v / b.v), t);
}

inline Diff& operator+=(Diff& a, const Diff& b) { a = a + b; return a; }
inline Diff& operator-=(Diff& a, const Diff& b) { a = a - b; return a; }
inline Diff& operator*=(Diff& a, const Diff& b) { a = a * b; return a; }
inline Diff& operator/=(Diff& a, const Diff& b) { a = a / b; return a; }

inline Diff exp(const Diff& a) {
    double v = std::exp(a.v);
    if (!a.tape) return Diff(v);
    return Diff(v, a.tape->push1(Op::Exp, v, a.ix, v), a.tape);
}

inline Diff log(const Diff& a) {
    double v = std::log(a.v);
    if (!a.tape) return Diff(v);
    return Diff(v, a.tape->push1(Op::Log, v, a.ix, 1.0 / a.v), a.tape);
}

inline Diff sqrt(const Diff& a) {
    double v = std::sqrt(a.v);
    if (!a.tape) return Diff(v);
    return Diff(v, a.tape->push1(Op::Sqrt, v, a.ix, 0.5 / v), a.tape);
}

inline Diff abs(const Diff& a) {
    double v = std::fabs(a.v);
    if (!a.tape) return Diff(v);
    return Diff(v, a.tape->push1(Op::Abs, v, a.ix, a.v >= 0.0 ? 1.0 : -1.0), a.tape);
}

inline Diff sin(const Diff& a) {
    double v = std::sin(a.v);
    if (!a.tape) return Diff(v);
    return Diff(v, a.tape->push1(Op::Sin, v, a.ix, std::cos(a.v)), a.tape);
}

inline Diff cos(const Diff& a) {
    double v = std::cos(a.v);
    if (!a.tape) return Diff(v);
    return Diff(v, a.tape->push1(Op::Cos, v, a.ix, -std::sin(a.v)), a.tape);
}

// x^p for constant p
inline Diff pow(const Diff& a, double p) {
    double v = std::pow(a.v, p);
    if (!a.tape) return Diff(v);
    return Diff(v, a.tape->push1(Op::PowConst, v, a.ix, p * std::pow(a.v, p - 1.0)), a.tape);
}

// subgradient 1 on the winning branch; ties go to the first argument
inline Diff max(const Diff& a, const Diff& b) {
    Tape* t = detail::tape_of(a, b);
    bool first = a.v >= b.v;
    double v = first ? a.v : b.v;
    if (!t) return Diff(v);
    if (!a.tape) return Diff(v, t->push1(Op::Max, v, b.ix, first ? 0.0 : 1.0), t);
    if (!b.tape) return Diff(v, t->push1(Op::Max, v, a.ix, first ? 1.0 : 0.0), t);
    return Diff(v, t->push2(Op::Max, v, a.ix, b.ix, first ? 1.0 : 0.0, first ? 0.0 : 1.0), t);
}

inline Diff min(const Diff& a, const Diff& b) {
    Tape* t = detail::tape_of(a, b);
    bool first = a.v <= b.v;
    double v = first ? a.v : b.v;
    if (!t) return Diff(v);
    if (!a.tape) return Diff(v, t->push1(Op::Min, v, b.ix, first ? 0.0 : 1.0), t);
    if (!b.tape) return Diff(v, t->push1(Op::Min, v, a.ix, first ? 1.0 : 0.0), t);
    return Diff(v, t->push2(Op::Min, v, a.ix, b.ix, first ? 1.0 : 0.0, first ? 0.0 : 1.0), t);
}

// a + c*b with constant c
inline Diff axpy(double c, const Diff& b, const Diff& a) {
    Tape* t = detail::tape_of(a, b);
    double v = a.v + c * b.v;
    if (!t) return Diff(v);
    if (!a.tape) return Diff(v, t->push1(Op::Axpy, v, b.ix, c), t);
    if (!b.tape) return Diff(v, t->push1(Op::Axpy, v, a.ix, 1.0), t);
    return Diff(v, t->push2(Op::Axpy, v, a.ix, b.ix, 1.0, c), t);
}

// Fixed-coefficient linear combination sum_i c_i x_i (+offset). All x on one
// tape (or all constants).
Diff wsum(std::span<const Diff> xs, std::span<const double> coeffs, double offset = 0.0);

// Inner product sum_i x_i y_i of two equally long spans.
Diff dot(std::span<const Diff> xs, std::span<const Diff> ys);

// log(sum_i exp(x_i)); softmax written to `softmax_out` if non-null.
Diff logsumexp(std::span<const Diff> xs, double* softmax_out = nullptr);

inline double value(const Diff& d) { return d.v; }
inline double value(double d) { return d; }

// Plain-double twins so numeric code can be templated on the scalar type.
inline double exp(double a) { return std::exp(a); }
inline double log(double a) { return std::log(a); }
inline double sqrt(double a) { return std::sqrt(a); }
inline double abs(double a) { return std::fabs(a); }
inline double sin(double a) { return std::sin(a); }
inline double cos(double a) { return std::cos(a); }
inline double pow(double a, double p) { return std::pow(a, p); }
inline double max(double a, double b) { return a >= b ? a : b; }
inline double min(double a, double b) { return a <= b ? a : b; }
inline double axpy(double c, double b, double a) { return a + c * b; }

inline double wsum(std::span<const double> xs, std::span<const double> coeffs,
                   double offset = 0.0) {
    double v = offset;
    for (size_t i = 0; i < xs.size(); ++i) v += coeffs[i] * xs[i];
    return v;
}

inline double dot(std::span<const double> xs, std::span<const double> ys) {
    double v = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) v += xs[i] * ys[i];
    return v;
}

inline double logsumexp(std::span<const double> xs, double* softmax_out = nullptr) {
    double m = xs[0];
    for (double x : xs) m = std::max(m, x);
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    if (softmax_out)
        for (size_t i = 0; i < xs.size(); ++i) softmax_out[i] = std::exp(xs[i] - m) / s;
    return m + std::log(s);
}

} // namespace shapediag::ad

#endif
