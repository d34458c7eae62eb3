#include "shapediag/pde/mfs.hpp"

#include "shapediag/ad/linalg.hpp"

namespace shapediag::pde {

namespace {
constexpr double kPi = 3.14159265358979323846;

// free-space Laplace kernel and its gradient in the separation vector
// 2D: -(1/4pi) ln |d|^2,  3D: 1/(4pi |d|)
double kernel(int dim, const double* d, double* grad_out) {
    if (dim == 2) {
        double s = d[0] * d[0] + d[1] * d[1];
        if (grad_out) {
            grad_out[0] = -d[0] / (2.0 * kPi * s);
            grad_out[1] = -d[1] / (2.0 * kPi * s);
        }
        return -std::log(s) / (4.0 * kPi);
    }
    double s = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    double r = std::sqrt(s);
    if (grad_out) {
        double c = -1.0 / (4.0 * kPi * s * r);
        grad_out[0] = c * d[0];
        grad_out[1] = c * d[1];
        grad_out[2] = c * d[2];
    }
    return 1.0 / (4.0 * kPi * r);
}
} // namespace

void MfsConfig::validate() const {
    if (n_collocation < 2 * n_sources)
        throw std::invalid_argument("MfsConfig: need n_collocation >= 2*n_sources");
    if (!(offset > 0.0)) throw std::invalid_argument("MfsConfig: need offset > 0");
}

template <class S>
S torsion(geom::GaugeEval<S>& ev, const quad::Quadrature& q, const MfsConfig& cfg) {
    cfg.validate();
    const int dim = ev.dim();
    const bool with_const = (dim == 2);
    const int ncol = cfg.n_collocation, nsrc = cfg.n_sources;
    const int ncols = nsrc + (with_const ? 1 : 0);

    std::vector<quad::Point> src_dirs, col_dirs;
    std::vector<double> wtmp;
    quad::sphere_nodes(dim, nsrc, src_dirs, wtmp);
    quad::sphere_nodes(dim, ncol, col_dirs, wtmp);

    // mapped boundary points and dilated sources
    std::vector<std::array<S, 3>> src(nsrc), col(ncol);
    {
        std::array<S, 3> phi;
        S jac;
        for (int i = 0; i < nsrc; ++i) {
            ev.volume_point(src_dirs[i].data(), phi, jac);
            for (int d = 0; d < dim; ++d) src[i][d] = S(1.0 + cfg.offset) * phi[d];
        }
        for (int j = 0; j < ncol; ++j) ev.volume_point(col_dirs[j].data(), col[j], jac);
    }

    // collocation matrix and Dirichlet data
    if constexpr (std::is_same_v<S, double>) {
        Eigen::MatrixXd a(ncol, ncols);
        Eigen::MatrixXd b(ncol, 1);
        double d[3];
        for (int j = 0; j < ncol; ++j) {
            for (int i = 0; i < nsrc; ++i) {
                for (int k = 0; k < dim; ++k) d[k] = col[j][k] - src[i][k];
                a(j, i) = kernel(dim, d, nullptr);
            }
            if (with_const) a(j, nsrc) = 1.0;
            b(j, 0) = 0.5 * col[j][0] * col[j][0];
        }
        Eigen::VectorXd c;
        try {
            c = ad::lstsq(a, b);
        } catch (const std::runtime_error&) {
            throw MfsIllPosed();
        }
        // T = sum w (phi_hat(phi(x)) - phi(x)_1^2/2) jac
        double total = 0.0;
        std::array<double, 3> phi;
        double jac;
        for (size_t m = 0; m < q.volume_nodes.size(); ++m) {
            ev.volume_point(q.volume_nodes[m].data(), phi, jac);
            double u = with_const ? c(nsrc) : 0.0;
            for (int i = 0; i < nsrc; ++i) {
                for (int k = 0; k < dim; ++k) d[k] = phi[k] - src[i][k];
                u += c(i) * kernel(dim, d, nullptr);
            }
            u -= 0.5 * phi[0] * phi[0];
            total += q.volume_weights[m] * u * jac;
        }
        return total;
    } else {
        ad::Tape& tape = *ev.lifted().log_beta.tape;
        ad::DiffMatrix a(ncol, ncols, &tape);
        ad::DiffMatrix b(ncol, 1, &tape);
        std::vector<int64_t> ids;
        std::vector<double> parts;
        double d[3], g[3];
        for (int j = 0; j < ncol; ++j) {
            for (int i = 0; i < nsrc; ++i) {
                for (int k = 0; k < dim; ++k) d[k] = col[j][k].v - src[i][k].v;
                double val = kernel(dim, d, g);
                ids.clear();
                parts.clear();
                for (int k = 0; k < dim; ++k) {
                    ids.push_back(col[j][k].ix);
                    parts.push_back(g[k]);
                }
                for (int k = 0; k < dim; ++k) {
                    ids.push_back(src[i][k].ix);
                    parts.push_back(-g[k]);
                }
                a.ix[size_t(j) * ncols + i] = tape.push_nary(ad::Op::Custom, val, ids, parts);
            }
            if (with_const) a.set(j, nsrc, ad::Diff(1.0));
            b.set(j, 0, S(0.5) * col[j][0] * col[j][0]);
        }
        ad::DiffMatrix c;
        try {
            c = ad::lstsq(a, b);
        } catch (const std::runtime_error&) {
            throw MfsIllPosed();
        }
        // per-node field values as single records over (phi, sources, c)
        const size_t nv = q.volume_nodes.size();
        std::vector<S> terms(nv);
        std::array<S, 3> phi;
        S jac;
        for (size_t m = 0; m < nv; ++m) {
            ev.volume_point(q.volume_nodes[m].data(), phi, jac);
            ids.clear();
            parts.clear();
            double u = 0.0;
            // dU/dphi accumulates over sources
            double dphi[3] = {0, 0, 0};
            for (int i = 0; i < nsrc; ++i) {
                for (int k = 0; k < dim; ++k) d[k] = phi[k].v - src[i][k].v;
                double ci = tape.value(c.ix[i]);
                double val = kernel(dim, d, g);
                u += ci * val;
                for (int k = 0; k < dim; ++k) dphi[k] += ci * g[k];
                // dU/dy_i = -c_i grad, dU/dc_i = psi
                for (int k = 0; k < dim; ++k) {
                    ids.push_back(src[i][k].ix);
                    parts.push_back(-ci * g[k]);
                }
                ids.push_back(c.ix[i]);
                parts.push_back(val);
            }
            if (with_const) {
                u += tape.value(c.ix[nsrc]);
                ids.push_back(c.ix[nsrc]);
                parts.push_back(1.0);
            }
            u -= 0.5 * phi[0].v * phi[0].v;
            dphi[0] -= phi[0].v;
            for (int k = 0; k < dim; ++k) {
                ids.push_back(phi[k].ix);
                parts.push_back(dphi[k]);
            }
            S field(u, tape.push_nary(ad::Op::Custom, u, ids, parts), &tape);
            terms[m] = field * jac;
        }
        return ad::wsum(terms, q.volume_weights);
    }
}

template double torsion<double>(geom::GaugeEval<double>&, const quad::Quadrature&,
                                const MfsConfig&);
template ad::Diff torsion<ad::Diff>(geom::GaugeEval<ad::Diff>&, const quad::Quadrature&,
                                    const MfsConfig&);

double torsion_from_points(int dim, std::span<const std::array<double, 3>> sources,
                           std::span<const std::array<double, 3>> collocation,
                           std::span<const std::array<double, 3>> interior_nodes,
                           std::span<const double> interior_weights) {
    const bool with_const = (dim == 2);
    const int nsrc = int(sources.size()), ncol = int(collocation.size());
    const int ncols = nsrc + (with_const ? 1 : 0);
    Eigen::MatrixXd a(ncol, ncols);
    Eigen::MatrixXd b(ncol, 1);
    double d[3];
    for (int j = 0; j < ncol; ++j) {
        for (int i = 0; i < nsrc; ++i) {
            for (int k = 0; k < dim; ++k) d[k] = collocation[j][k] - sources[i][k];
            a(j, i) = kernel(dim, d, nullptr);
        }
        if (with_const) a(j, nsrc) = 1.0;
        b(j, 0) = 0.5 * collocation[j][0] * collocation[j][0];
    }
    Eigen::VectorXd c;
    try {
        c = ad::lstsq(a, b);
    } catch (const std::runtime_error&) {
        throw MfsIllPosed();
    }
    double total = 0.0;
    for (size_t m = 0; m < interior_nodes.size(); ++m) {
        double u = with_const ? c(nsrc) : 0.0;
        for (int i = 0; i < nsrc; ++i) {
            for (int k = 0; k < dim; ++k) d[k] = interior_nodes[m][k] - sources[i][k];
            u += c(i) * kernel(dim, d, nullptr);
        }
        u -= 0.5 * interior_nodes[m][0] * interior_nodes[m][0];
        total += interior_weights[m] * u;
    }
    return total;
}

} // namespace shapediag::pde
