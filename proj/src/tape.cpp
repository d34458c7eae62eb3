#include "shapediag/ad/tape.hpp"

#include <algorithm>

namespace shapediag::ad {

const char* op_name(Op op) {
    switch (op) {
        case Op::Leaf: return "leaf";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Div: return "div";
        case Op::Neg: return "neg";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Sqrt: return "sqrt";
        case Op::Abs: return "abs";
        case Op::Max: return "max";
        case Op::Min: return "min";
        case Op::PowConst: return "pow";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Axpy: return "axpy";
        case Op::WSum: return "wsum";
        case Op::Dot: return "dot";
        case Op::Custom: return "custom";
        case Op::MatOut: return "matrix-output";
    }
    return "?";
}

void Tape::backward(int64_t seed) {
    std::pair<int64_t, double> s{seed, 1.0};
    backward_multi(std::span<const std::pair<int64_t, double>>(&s, 1));
}

void Tape::backward_multi(std::span<const std::pair<int64_t, double>> seeds) {
    adj_.assign(val_.size(), 0.0);
    int64_t top = -1;
    for (auto& [ix, w] : seeds) {
        adj_[ix] += w;
        top = std::max(top, ix);
    }
    if (top >= 0) sweep(top);
}

void Tape::sweep(int64_t top) {
    for (int64_t i = top; i >= 0; --i) {
        const Rec& r = rec_[i];
        if (r.a == kMatTag) {
            // all outputs of the matrix record are final once the sweep
            // reaches its first (lowest-index) output
            mat_[r.b]->backward(*this);
            continue;
        }
        double w = adj_[i];
        if (w == 0.0) continue;
        if (!std::isfinite(w)) throw NonFiniteAdjoint(op_[i], i);
        if (r.a == kNaryTag) {
            const NaryRec& nr = nary_[r.b];
            const int64_t* ids = nary_ids_.data() + nr.off;
            const double* ps = nary_part_.data() + nr.off;
            for (int64_t k = 0; k < nr.n; ++k) {
                double c = ps[k] * w;
                if (!std::isfinite(c)) throw NonFiniteAdjoint(op_[i], i);
                adj_[ids[k]] += c;
            }
            continue;
        }
        if (r.a >= 0) {
            double c = r.da * w;
            if (!std::isfinite(c)) throw NonFiniteAdjoint(op_[i], i);
            adj_[r.a] += c;
        }
        if (r.b >= 0) {
            double c = r.db * w;
            if (!std::isfinite(c)) throw NonFiniteAdjoint(op_[i], i);
            adj_[r.b] += c;
        }
    }
}

std::vector<double> grad(const Diff& loss, std::span<const Diff> params) {
    if (!loss.tape) throw std::logic_error("grad of a constant loss");
    loss.tape->backward(loss.ix);
    std::vector<double> g;
    g.reserve(params.size());
    for (const Diff& p : params) {
        if (p.tape != loss.tape) throw std::logic_error("parameter not on the loss tape");
        g.push_back(loss.tape->adjoint(p.ix));
    }
    return g;
}

Diff wsum(std::span<const Diff> xs, std::span<const double> coeffs, double offset) {
    assert(xs.size() == coeffs.size());
    Tape* t = nullptr;
    double v = offset;
    for (size_t i = 0; i < xs.size(); ++i) {
        v += coeffs[i] * xs[i].v;
        if (xs[i].tape) {
            if (t) t->check_same(xs[i]);
            t = xs[i].tape;
        }
    }
    if (!t) return Diff(v);
    std::vector<int64_t> ids;
    std::vector<double> ps;
    ids.reserve(xs.size());
    ps.reserve(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        if (!xs[i].tape) continue; // constants contribute to the value only
        ids.push_back(xs[i].ix);
        ps.push_back(coeffs[i]);
    }
    return Diff(v, t->push_nary(Op::WSum, v, ids, ps), t);
}

Diff dot(std::span<const Diff> xs, std::span<const Diff> ys) {
    assert(xs.size() == ys.size());
    Tape* t = nullptr;
    double v = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        v += xs[i].v * ys[i].v;
        if (xs[i].tape) t = xs[i].tape;
        if (ys[i].tape) t = ys[i].tape;
    }
    if (!t) return Diff(v);
    std::vector<int64_t> ids;
    std::vector<double> ps;
    ids.reserve(2 * xs.size());
    ps.reserve(2 * xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].tape) {
            t->check_same(xs[i]);
            ids.push_back(xs[i].ix);
            ps.push_back(ys[i].v);
        }
        if (ys[i].tape) {
            t->check_same(ys[i]);
            ids.push_back(ys[i].ix);
            ps.push_back(xs[i].v);
        }
    }
    return Diff(v, t->push_nary(Op::Dot, v, ids, ps), t);
}

Diff logsumexp(std::span<const Diff> xs, double* softmax_out) {
    Tape* t = nullptr;
    double m = -1e300;
    for (const Diff& x : xs) {
        m = std::max(m, x.v);
        if (x.tape) {
            if (t) t->check_same(x);
            t = x.tape;
        }
    }
    double s = 0.0;
    for (const Diff& x : xs) s += std::exp(x.v - m);
    double v = m + std::log(s);
    if (softmax_out) {
        for (size_t i = 0; i < xs.size(); ++i) softmax_out[i] = std::exp(xs[i].v - m) / s;
    }
    if (!t) return Diff(v);
    std::vector<int64_t> ids;
    std::vector<double> ps;
    ids.reserve(xs.size());
    ps.reserve(xs.size());
    for (const Diff& x : xs) {
        if (!x.tape) continue;
        ids.push_back(x.ix);
        ps.push_back(std::exp(x.v - m) / s);
    }
    return Diff(v, t->push_nary(Op::Custom, v, ids, ps), t);
}

} // namespace shapediag::ad
