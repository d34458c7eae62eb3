#include "shapediag/geom/gauge.hpp"

#include <cmath>

#include "shapediag/quad/quadrature.hpp"
#include "shapediag/util/rng.hpp"

namespace shapediag::geom {

namespace {
constexpr double kOrthoTol = 1e-12;

Eigen::Matrix3d embed(const Eigen::MatrixXd& m) {
    Eigen::Matrix3d e = Eigen::Matrix3d::Identity();
    e.topLeftCorner(m.rows(), m.cols()) = m;
    return e;
}
} // namespace

SymmetryGroup SymmetryGroup::trivial(int dim) {
    SymmetryGroup g;
    g.dim = dim;
    g.elements.push_back(Eigen::Matrix3d::Identity());
    return g;
}

SymmetryGroup SymmetryGroup::axis_reflections_2d() {
    SymmetryGroup g;
    g.dim = 2;
    for (double sx : {1.0, -1.0})
        for (double sy : {1.0, -1.0}) {
            Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
            m(0, 0) = sx;
            m(1, 1) = sy;
            g.elements.push_back(m);
        }
    return g;
}

void SymmetryGroup::validate() const {
    if (elements.empty()) throw std::invalid_argument("symmetry group: empty");
    auto find = [&](const Eigen::Matrix3d& m) {
        for (const auto& e : elements)
            if ((e - m).cwiseAbs().maxCoeff() <= kOrthoTol) return true;
        return false;
    };
    if (!find(Eigen::Matrix3d::Identity()))
        throw std::invalid_argument("symmetry group: missing identity");
    for (const auto& e : elements) {
        if ((e.transpose() * e - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > kOrthoTol)
            throw std::invalid_argument("symmetry group: element not orthogonal");
        if (!find(e.transpose())) throw std::invalid_argument("symmetry group: inverse missing");
        for (const auto& f : elements)
            if (!find(e * f)) throw std::invalid_argument("symmetry group: not closed");
    }
}

Eigen::VectorXd GaugeNetwork::pack() const {
    Eigen::VectorXd p(n_params());
    p(0) = log_beta;
    for (int i = 0; i < n_dirs(); ++i)
        for (int d = 0; d < dim; ++d) p(1 + i * dim + d) = W(d, i);
    return p;
}

GaugeNetwork GaugeNetwork::unpack(int dim, int n_dirs, const Eigen::VectorXd& p) {
    GaugeNetwork net;
    net.dim = dim;
    net.log_beta = p(0);
    net.W.resize(dim, n_dirs);
    for (int i = 0; i < n_dirs; ++i)
        for (int d = 0; d < dim; ++d) net.W(d, i) = p(1 + i * dim + d);
    return net;
}

LiftedGauge<ad::Diff> lift_params(ad::Tape& tape, const GaugeBody& body) {
    LiftedGauge<ad::Diff> g;
    g.dim = body.net.dim;
    g.n = body.net.n_dirs();
    g.group = &body.group;
    g.log_beta = tape.input(body.net.log_beta);
    g.w.reserve(size_t(g.n) * g.dim);
    for (int i = 0; i < g.n; ++i)
        for (int d = 0; d < g.dim; ++d) g.w.push_back(tape.input(body.net.W(d, i)));
    g.beta = ad::exp(g.log_beta);
    return g;
}

LiftedGauge<double> lift_params(const GaugeBody& body) {
    LiftedGauge<double> g;
    g.dim = body.net.dim;
    g.n = body.net.n_dirs();
    g.group = &body.group;
    g.log_beta = body.net.log_beta;
    g.w.reserve(size_t(g.n) * g.dim);
    for (int i = 0; i < g.n; ++i)
        for (int d = 0; d < g.dim; ++d) g.w.push_back(body.net.W(d, i));
    g.beta = std::exp(body.net.log_beta);
    return g;
}

// --------------------------------------------------------------- jet core

namespace {

// value-only log-sum-exp with softmax
double lse_values(const double* z, int n, double* sigma) {
    double m = z[0];
    for (int i = 1; i < n; ++i) m = std::max(m, z[i]);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(z[i] - m);
    for (int i = 0; i < n; ++i) sigma[i] = std::exp(z[i] - m) / s;
    return m + std::log(s);
}

} // namespace

// Jet of the single-network factor Q(x) = beta * LSE(W^T x/|x|) at a unit
// direction y: value, ambient gradient, ambient Hessian of the 0-homogeneous
// extension.
template <class S>
void GaugeEval<S>::single_jet(const double* y, int level, SphereJet<S>& out) {
    const int dim = g_.dim, n = g_.n;
    z_.resize(n);
    sigma_.resize(n);

    if constexpr (std::is_same_v<S, double>) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int d = 0; d < dim; ++d) s += g_.w[size_t(i) * dim + d] * y[d];
            z_[i] = s;
        }
        double lse = lse_values(z_.data(), n, sigma_.data());
        out.q = g_.beta * lse;
        if (level < 1) return;

        double gv[3] = {0, 0, 0};
        for (int a = 0; a < dim; ++a)
            for (int i = 0; i < n; ++i) gv[a] += g_.w[size_t(i) * dim + a] * sigma_[i];
        double t = 0.0;
        for (int c = 0; c < dim; ++c) t += y[c] * gv[c];
        for (int a = 0; a < dim; ++a) out.grad[a] = g_.beta * (gv[a] - t * y[a]);
        if (level < 2) return;

        // raw second moment M = sum_i sigma_i w_i w_i^T, S = M - g g^T
        double smat[9];
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                double m = 0.0;
                for (int i = 0; i < n; ++i)
                    m += sigma_[i] * g_.w[size_t(i) * dim + a] * g_.w[size_t(i) * dim + b];
                smat[a * dim + b] = m - gv[a] * gv[b];
            }
        // hess = beta [ P S P - g y^T - y g^T - t (I - 3 y y^T) ]
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                double psp = 0.0;
                for (int c = 0; c < dim; ++c)
                    for (int d = 0; d < dim; ++d) {
                        double pac = (a == c ? 1.0 : 0.0) - y[a] * y[c];
                        double pdb = (d == b ? 1.0 : 0.0) - y[d] * y[b];
                        psp += pac * smat[c * dim + d] * pdb;
                    }
                double v = psp - gv[a] * y[b] - y[a] * gv[b] -
                           t * ((a == b ? 1.0 : 0.0) - 3.0 * y[a] * y[b]);
                out.hess[a * dim + b] = g_.beta * v;
            }
        return;
    } else {
        ad::Tape& tape = *g_.log_beta.tape;
        // z_i = w_i . y  (fixed direction coefficients)
        for (int i = 0; i < n; ++i)
            z_[i] = ad::wsum(std::span<const ad::Diff>(&g_.w[size_t(i) * dim], dim),
                             std::span<const double>(y, dim));
        S lse = ad::logsumexp(z_, sigma_.data());
        out.q = g_.beta * lse;
        if (level < 1) return;

        // g_a = sum_i W_ai sigma_i as one record per component:
        //   d g_a / d z_j  = sigma_j (W_aj - g_a)
        //   d g_a / d W_aj = sigma_j
        std::array<S, 3> gv;
        double gval[3] = {0, 0, 0};
        for (int a = 0; a < dim; ++a)
            for (int i = 0; i < n; ++i) gval[a] += g_.w[size_t(i) * dim + a].v * sigma_[i];
        for (int a = 0; a < dim; ++a) {
            ids_.clear();
            parts_.clear();
            for (int j = 0; j < n; ++j) {
                ids_.push_back(z_[j].ix);
                parts_.push_back(sigma_[j] * (g_.w[size_t(j) * dim + a].v - gval[a]));
            }
            for (int j = 0; j < n; ++j) {
                ids_.push_back(g_.w[size_t(j) * dim + a].ix);
                parts_.push_back(sigma_[j]);
            }
            gv[a] = S(gval[a], tape.push_nary(ad::Op::Custom, gval[a], ids_, parts_), &tape);
        }
        S t = ad::wsum(std::span<const S>(gv.data(), dim), std::span<const double>(y, dim));
        for (int a = 0; a < dim; ++a) out.grad[a] = g_.beta * ad::axpy(-y[a], t, gv[a]);
        if (level < 2) return;

        // raw second moment entries, one record each:
        //   d M_ab / d z_j  = sigma_j (W_aj W_bj - M_ab)
        //   d M_ab / d W_aj = sigma_j W_bj   (doubled on the diagonal)
        std::array<S, 9> smat;
        for (int a = 0; a < dim; ++a)
            for (int b = a; b < dim; ++b) {
                double mv = 0.0;
                for (int i = 0; i < n; ++i)
                    mv += sigma_[i] * g_.w[size_t(i) * dim + a].v * g_.w[size_t(i) * dim + b].v;
                ids_.clear();
                parts_.clear();
                for (int j = 0; j < n; ++j) {
                    ids_.push_back(z_[j].ix);
                    parts_.push_back(sigma_[j] * (g_.w[size_t(j) * dim + a].v *
                                                      g_.w[size_t(j) * dim + b].v -
                                                  mv));
                }
                if (a == b) {
                    for (int j = 0; j < n; ++j) {
                        ids_.push_back(g_.w[size_t(j) * dim + a].ix);
                        parts_.push_back(2.0 * sigma_[j] * g_.w[size_t(j) * dim + a].v);
                    }
                } else {
                    for (int j = 0; j < n; ++j) {
                        ids_.push_back(g_.w[size_t(j) * dim + a].ix);
                        parts_.push_back(sigma_[j] * g_.w[size_t(j) * dim + b].v);
                    }
                    for (int j = 0; j < n; ++j) {
                        ids_.push_back(g_.w[size_t(j) * dim + b].ix);
                        parts_.push_back(sigma_[j] * g_.w[size_t(j) * dim + a].v);
                    }
                }
                S m(mv, tape.push_nary(ad::Op::Custom, mv, ids_, parts_), &tape);
                S s = m - gv[a] * gv[b];
                smat[a * dim + b] = s;
                smat[b * dim + a] = s;
            }
        for (int a = 0; a < dim; ++a)
            for (int b = a; b < dim; ++b) {
                // P S P with constant P = I - y y^T, plus the rank-one parts,
                // as a single fixed-coefficient combination
                std::vector<S> xs;
                std::vector<double> cs;
                for (int c = 0; c < dim; ++c)
                    for (int d = 0; d < dim; ++d) {
                        double pac = (a == c ? 1.0 : 0.0) - y[a] * y[c];
                        double pdb = (d == b ? 1.0 : 0.0) - y[d] * y[b];
                        xs.push_back(smat[c * dim + d]);
                        cs.push_back(pac * pdb);
                    }
                xs.push_back(gv[a]);
                cs.push_back(-y[b]);
                xs.push_back(gv[b]);
                cs.push_back(-y[a]);
                xs.push_back(t);
                cs.push_back(-((a == b ? 1.0 : 0.0) - 3.0 * y[a] * y[b]));
                S h = g_.beta * ad::wsum(xs, cs);
                out.hess[a * dim + b] = h;
                out.hess[b * dim + a] = h;
            }
        return;
    }
}

template <class S>
void GaugeEval<S>::sphere_jet(const double* nhat, int level, SphereJet<S>& out) {
    const SymmetryGroup& grp = *g_.group;
    const int dim = g_.dim;
    if (grp.is_trivial()) {
        single_jet(nhat, level, out);
        return;
    }
    SphereJet<S> part;
    bool first = true;
    for (const auto& e : grp.elements) {
        double y[3] = {0, 0, 0};
        // y = g^-1 nhat = g^T nhat
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) y[a] += e(b, a) * nhat[b];
        single_jet(y, level, part);
        // transform back: grad -> g grad, hess -> g hess g^T
        SphereJet<S> tr;
        tr.q = part.q;
        if (level >= 1) {
            for (int a = 0; a < dim; ++a) {
                std::array<double, 3> row;
                for (int b = 0; b < dim; ++b) row[b] = e(a, b);
                tr.grad[a] = ad::wsum(std::span<const S>(part.grad.data(), dim),
                                      std::span<const double>(row.data(), dim));
            }
        }
        if (level >= 2) {
            for (int a = 0; a < dim; ++a)
                for (int b = a; b < dim; ++b) {
                    std::vector<S> xs;
                    std::vector<double> cs;
                    for (int c = 0; c < dim; ++c)
                        for (int d = 0; d < dim; ++d) {
                            xs.push_back(part.hess[c * dim + d]);
                            cs.push_back(e(a, c) * e(b, d));
                        }
                    S h = ad::wsum(xs, cs);
                    tr.hess[a * dim + b] = h;
                    tr.hess[b * dim + a] = h;
                }
        }
        if (first) {
            out = tr;
            first = false;
        } else {
            out.q += tr.q;
            if (level >= 1)
                for (int a = 0; a < dim; ++a) out.grad[a] += tr.grad[a];
            if (level >= 2)
                for (int k = 0; k < dim * dim; ++k) out.hess[k] += tr.hess[k];
        }
    }
}

namespace {
template <class S>
void check_positive(const S& q) {
    if (!(ad::value(q) > 1e-12)) throw GaugeNotPositive();
}
} // namespace

template <class S>
S GaugeEval<S>::gauge_value(const double* x) {
    const int dim = g_.dim;
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
    double r = std::sqrt(r2);
    if (r == 0.0) throw std::invalid_argument("gauge_value: x = 0");
    double nhat[3] = {0, 0, 0};
    for (int d = 0; d < dim; ++d) nhat[d] = x[d] / r;
    SphereJet<S> jet;
    sphere_jet(nhat, 0, jet);
    check_positive(jet.q);
    return S(r) * jet.q;
}

template <class S>
void GaugeEval<S>::volume_point(const double* x, std::array<S, 3>& phi, S& jac) {
    SphereJet<S> jet;
    volume_point_jet(x, 0, jet, phi, jac);
}

template <class S>
void GaugeEval<S>::volume_point_jet(const double* x, int level, SphereJet<S>& jet,
                                    std::array<S, 3>& phi, S& jac) {
    const int dim = g_.dim;
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
    double r = std::sqrt(r2);
    double nhat[3] = {0, 0, 0};
    for (int d = 0; d < dim; ++d) nhat[d] = x[d] / r;
    sphere_jet(nhat, level, jet);
    check_positive(jet.q);
    S inv_q = S(1.0) / jet.q;
    for (int d = 0; d < dim; ++d) phi[d] = S(x[d]) * inv_q;
    S iq2 = inv_q * inv_q;
    jac = (dim == 2) ? iq2 : iq2 * inv_q;
}

template <class S>
void GaugeEval<S>::spatial_jacobian(const SphereJet<S>& jet, const double* nhat, S* dphi) {
    const int dim = g_.dim;
    S inv_q = S(1.0) / jet.q;
    S iq2 = inv_q * inv_q;
    std::array<S, 3> tmp;
    for (int b = 0; b < dim; ++b) tmp[b] = jet.grad[b] * iq2;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            if (a == b)
                dphi[a * dim + b] = ad::axpy(-nhat[a], tmp[b], inv_q);
            else
                dphi[a * dim + b] = S(-nhat[a]) * tmp[b];
        }
}

template <class S>
void GaugeEval<S>::neumann_pullback(const SphereJet<S>& jet, const double* nhat, S* a_out) {
    const int dim = g_.dim;
    S inv_q = S(1.0) / jet.q;
    S s0 = (dim == 2) ? S(1.0) : inv_q;              // q^{2-d}
    S s1 = (dim == 2) ? inv_q : inv_q * inv_q;       // q^{1-d}
    S jac = s1 * inv_q;                              // q^{-d}
    S gn2 = ad::dot(std::span<const S>(jet.grad.data(), dim),
                    std::span<const S>(jet.grad.data(), dim));
    S gg = jac * gn2;
    std::array<S, 3> tmp;
    for (int d = 0; d < dim; ++d) tmp[d] = s1 * jet.grad[d];
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            std::array<S, 4> xs{s0, tmp[a], tmp[b], gg};
            std::array<double, 4> cs{a == b ? 1.0 : 0.0, nhat[b], nhat[a], nhat[a] * nhat[b]};
            S v = ad::wsum(std::span<const S>(xs.data(), 4), std::span<const double>(cs.data(), 4));
            a_out[a * dim + b] = v;
            a_out[b * dim + a] = v;
        }
}

template <class S>
void GaugeEval<S>::boundary_point(const double* nhat, bool with_curvature, BoundaryPoint<S>& out) {
    const int dim = g_.dim;
    SphereJet<S> jet;
    sphere_jet(nhat, with_curvature ? 2 : 1, jet);
    check_positive(jet.q);
    out.q = jet.q;
    S inv_q = S(1.0) / jet.q;
    for (int d = 0; d < dim; ++d) out.phi[d] = S(nhat[d]) * inv_q;
    std::array<S, 3> v;
    for (int d = 0; d < dim; ++d) v[d] = ad::axpy(nhat[d], jet.q, jet.grad[d]);
    S vn2 = ad::dot(std::span<const S>(v.data(), dim), std::span<const S>(v.data(), dim));
    S vn = ad::sqrt(vn2);
    S iq2 = inv_q * inv_q;
    S jac = (dim == 2) ? iq2 : iq2 * inv_q;
    out.surf_jac = jac * vn;
    for (int d = 0; d < dim; ++d) out.normal[d] = v[d] / vn;
    if (!with_curvature) {
        out.mean_curvature = S(0.0);
        return;
    }
    // Dv = q P + nhat grad^T + grad nhat^T + hess (symmetric)
    std::array<S, 9> dv;
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            double pab = (a == b ? 1.0 : 0.0) - nhat[a] * nhat[b];
            std::array<S, 4> xs{jet.q, jet.grad[b], jet.grad[a], jet.hess[a * dim + b]};
            std::array<double, 4> cs{pab, nhat[a], nhat[b], 1.0};
            S e = ad::wsum(std::span<const S>(xs.data(), 4), std::span<const double>(cs.data(), 4));
            dv[a * dim + b] = e;
            dv[b * dim + a] = e;
        }
    // H = [tr(Dv C) - N^T Dv C N] / ((d-1) |v|),  C = (Dphi)^-1 = q I + nhat grad^T
    S tr_dv = dv[0];
    for (int a = 1; a < dim; ++a) tr_dv += dv[a * dim + a];
    // w_a = sum_b Dv_ab nhat_b
    std::array<S, 3> wv;
    for (int a = 0; a < dim; ++a)
        wv[a] = ad::wsum(std::span<const S>(&dv[a * dim], dim), std::span<const double>(nhat, dim));
    S t1 = jet.q * tr_dv + ad::dot(std::span<const S>(jet.grad.data(), dim),
                                   std::span<const S>(wv.data(), dim));
    // C N = q N + (grad . N) nhat
    S gn = ad::dot(std::span<const S>(jet.grad.data(), dim),
                   std::span<const S>(out.normal.data(), dim));
    std::array<S, 3> cn;
    for (int d = 0; d < dim; ++d) cn[d] = jet.q * out.normal[d] + S(nhat[d]) * gn;
    std::array<S, 3> dvcn;
    for (int a = 0; a < dim; ++a) {
        S s = dv[a * dim + 0] * cn[0];
        for (int b = 1; b < dim; ++b) s += dv[a * dim + b] * cn[b];
        dvcn[a] = s;
    }
    S t2 = ad::dot(std::span<const S>(out.normal.data(), dim),
                   std::span<const S>(dvcn.data(), dim));
    out.mean_curvature = (t1 - t2) / (S(double(dim - 1)) * vn);
}

template class GaugeEval<double>;
template class GaugeEval<ad::Diff>;

// ------------------------------------------------------------ constructors

double min_sphere_gauge(const GaugeBody& body, int samples) {
    std::vector<quad::Point> dirs;
    std::vector<double> wts;
    quad::sphere_nodes(body.net.dim, samples, dirs, wts);
    const int dim = body.net.dim;
    double lo = 1e300;
    std::vector<double> z(body.net.n_dirs());
    for (const auto& e : body.group.elements) {
        for (const auto& nd : dirs) {
            double y[3] = {0, 0, 0};
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) y[a] += e(b, a) * nd[b];
            for (int i = 0; i < body.net.n_dirs(); ++i) {
                double s = 0.0;
                for (int d = 0; d < dim; ++d) s += body.net.W(d, i) * y[d];
                z[i] = s;
            }
            double m = z[0];
            for (double v : z) m = std::max(m, v);
            double sum = 0.0;
            for (double v : z) sum += std::exp(v - m);
            lo = std::min(lo, m + std::log(sum));
        }
    }
    return lo;
}

GaugeNetwork init_random(int dim, int n_dirs, uint64_t seed, double scale) {
    if (n_dirs < dim + 1) throw std::invalid_argument("init_random: need N >= dim+1");
    std::vector<quad::Point> dirs;
    std::vector<double> wts;
    quad::sphere_nodes(dim, std::max(n_dirs, 8), dirs, wts);

    double jitter = 0.3;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Rng rng = Rng::substream(seed, uint64_t(attempt));
        GaugeNetwork net;
        net.dim = dim;
        net.W.resize(dim, n_dirs);
        for (int i = 0; i < n_dirs; ++i) {
            double base[3];
            if (dim == 2) {
                double a = 2.0 * 3.14159265358979323846 * i / n_dirs;
                base[0] = std::cos(a);
                base[1] = std::sin(a);
            } else {
                base[0] = dirs[i][0];
                base[1] = dirs[i][1];
                base[2] = dirs[i][2];
            }
            for (int d = 0; d < dim; ++d) net.W(d, i) = base[d] + jitter * rng.normal();
        }
        GaugeBody plain(net);
        if (min_sphere_gauge(plain) > 1e-6) {
            // beta from mean radius: radius(n) = 1/(beta LSE(W^T n))
            std::vector<quad::Point> cal;
            quad::sphere_nodes(dim, 1024, cal, wts);
            double acc = 0.0;
            std::vector<double> z(n_dirs), sg(n_dirs);
            for (const auto& nd : cal) {
                for (int i = 0; i < n_dirs; ++i) {
                    double s = 0.0;
                    for (int d = 0; d < dim; ++d) s += net.W(d, i) * nd[d];
                    z[i] = s;
                }
                acc += 1.0 / lse_values(z.data(), n_dirs, sg.data());
            }
            net.log_beta = std::log((acc / cal.size()) / scale);
            return net;
        }
        jitter *= 0.5;
    }
    throw std::runtime_error("init_random: positivity unreachable after 5 retries");
}

// ---------------------------------------------------------------- exports

std::vector<std::array<double, 2>> boundary_polyline(const GaugeBody& body, int count) {
    LiftedGauge<double> lg = lift_params(body);
    GaugeEval<double> ev(lg);
    std::vector<std::array<double, 2>> out;
    out.reserve(count);
    SphereJet<double> jet;
    for (int k = 0; k < count; ++k) {
        double a = 2.0 * 3.14159265358979323846 * k / count;
        double nhat[3] = {std::cos(a), std::sin(a), 0.0};
        ev.sphere_jet(nhat, 0, jet);
        if (!(jet.q > 0)) throw GaugeNotPositive();
        out.push_back({nhat[0] / jet.q, nhat[1] / jet.q});
    }
    return out;
}

double hausdorff_support(const std::vector<std::array<double, 2>>& a,
                         const std::vector<std::array<double, 2>>& b, int directions) {
    double worst = 0.0;
    for (int k = 0; k < directions; ++k) {
        double t = 2.0 * 3.14159265358979323846 * k / directions;
        double ux = std::cos(t), uy = std::sin(t);
        double ha = -1e300, hb = -1e300;
        for (const auto& p : a) ha = std::max(ha, ux * p[0] + uy * p[1]);
        for (const auto& p : b) hb = std::max(hb, ux * p[0] + uy * p[1]);
        worst = std::max(worst, std::fabs(ha - hb));
    }
    return worst;
}

} // namespace shapediag::geom
