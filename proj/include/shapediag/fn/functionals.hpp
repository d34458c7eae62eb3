#ifndef SHAPEDIAG_FN_FUNCTIONALS_HPP
#define SHAPEDIAG_FN_FUNCTIONALS_HPP

#include <array>
#include <vector>

#include "shapediag/ad/tape.hpp"
#include "shapediag/geom/gauge.hpp"
#include "shapediag/quad/quadrature.hpp"

namespace shapediag::fn {

enum class Functional { Vol, Per, W, E, T, Mu1, Mu2 };
const char* functional_name(Functional f);

// All integrals are pull-backs to the reference ball:
//   Vol = sum w_i jac(x_i)
//   Per = sum w_i surf_jac(nhat_i)
//   centroid = (1/Vol) sum w_i phi(x_i) jac(x_i)
//   W = sum w_i |phi(x_i) - centroid|^2 jac(x_i)
//   E = sum w_i H(nhat_i)^2 surf_jac(nhat_i)
// The evaluator is any type with the GaugeEval point interface (tests use an
// exact linear-map evaluator as the oracle).

namespace detail {
template <class S>
void check_finite(const S& v, const char* what, size_t node) {
    if (!std::isfinite(ad::value(v)))
        throw std::runtime_error(std::string(what) + ": non-finite value at node " +
                                 std::to_string(node));
}
} // namespace detail

template <class Ev, class S = typename Ev::Scalar>
S volume(Ev& ev, const quad::Quadrature& q) {
    std::vector<S> jacs(q.volume_nodes.size());
    std::array<S, 3> phi;
    for (size_t i = 0; i < q.volume_nodes.size(); ++i) {
        S jac;
        ev.volume_point(q.volume_nodes[i].data(), phi, jac);
        detail::check_finite(jac, "volume", i);
        jacs[i] = jac;
    }
    return ad::wsum(jacs, q.volume_weights);
}

template <class Ev, class S = typename Ev::Scalar>
S perimeter(Ev& ev, const quad::Quadrature& q) {
    std::vector<S> el(q.boundary_nodes.size());
    geom::BoundaryPoint<S> bp;
    for (size_t i = 0; i < q.boundary_nodes.size(); ++i) {
        ev.boundary_point(q.boundary_nodes[i].data(), false, bp);
        detail::check_finite(bp.surf_jac, "perimeter", i);
        el[i] = bp.surf_jac;
    }
    return ad::wsum(el, q.boundary_weights);
}

template <class S>
struct CentroidInertia {
    std::array<S, 3> centroid;
    S volume;
    S inertia;
};

template <class Ev, class S = typename Ev::Scalar>
CentroidInertia<S> centroid_and_inertia(Ev& ev, const quad::Quadrature& q) {
    const int dim = ev.dim();
    const size_t n = q.volume_nodes.size();
    std::vector<S> jacs(n);
    std::vector<std::array<S, 3>> phis(n);
    for (size_t i = 0; i < n; ++i) {
        ev.volume_point(q.volume_nodes[i].data(), phis[i], jacs[i]);
        detail::check_finite(jacs[i], "centroid_and_inertia", i);
    }
    CentroidInertia<S> out;
    out.volume = ad::wsum(jacs, q.volume_weights);
    std::vector<S> m(n);
    for (int d = 0; d < dim; ++d) {
        for (size_t i = 0; i < n; ++i) m[i] = phis[i][d] * jacs[i];
        out.centroid[d] = ad::wsum(m, q.volume_weights) / out.volume;
    }
    for (size_t i = 0; i < n; ++i) {
        S r2 = (phis[i][0] - out.centroid[0]) * (phis[i][0] - out.centroid[0]);
        for (int d = 1; d < dim; ++d)
            r2 += (phis[i][d] - out.centroid[d]) * (phis[i][d] - out.centroid[d]);
        m[i] = r2 * jacs[i];
    }
    out.inertia = ad::wsum(m, q.volume_weights);
    return out;
}

template <class Ev, class S = typename Ev::Scalar>
S willmore(Ev& ev, const quad::Quadrature& q) {
    std::vector<S> el(q.boundary_nodes.size());
    geom::BoundaryPoint<S> bp;
    for (size_t i = 0; i < q.boundary_nodes.size(); ++i) {
        ev.boundary_point(q.boundary_nodes[i].data(), true, bp);
        detail::check_finite(bp.mean_curvature, "willmore", i);
        el[i] = bp.mean_curvature * bp.mean_curvature * bp.surf_jac;
    }
    return ad::wsum(el, q.boundary_weights);
}

// max over volume nodes of cond(Dphi), the flattening regularizer; for
// ad::Diff the singular values go through the SVD record with its cluster
// rule so crossings stay bounded
ad::Diff max_jacobian_cond(geom::GaugeEval<ad::Diff>& ev, const quad::Quadrature& q);
double max_jacobian_cond(geom::GaugeEval<double>& ev, const quad::Quadrature& q);

} // namespace shapediag::fn

#endif
