#ifndef SHAPEDIAG_PDE_MFS_HPP
#define SHAPEDIAG_PDE_MFS_HPP

#include <span>
#include <vector>

#include "shapediag/fn/functionals.hpp"

namespace shapediag::pde {

// Method of fundamental solutions for the torsion problem: fit a harmonic
// phi = sum_i c_i psi(x - y_i) (+ c0 in 2D) to the Dirichlet data x1^2/2 on
// the boundary in the least-squares sense, then T = integral of
// phi - x1^2/2 over the body. Sources sit at (1+offset) * boundary points.
struct MfsConfig {
    int n_sources = 64;
    int n_collocation = 256;
    double offset = 0.5;

    static MfsConfig standard(int dim) {
        MfsConfig c;
        if (dim == 3) {
            c.n_sources = 200;
            c.n_collocation = 800;
        }
        return c;
    }
    void validate() const;
};

struct MfsIllPosed : std::runtime_error {
    MfsIllPosed() : std::runtime_error("MFS ill-posed; increase offset or reduce sources") {}
};

template <class S>
S torsion(geom::GaugeEval<S>& ev, const quad::Quadrature& q, const MfsConfig& cfg);

extern template double torsion<double>(geom::GaugeEval<double>&, const quad::Quadrature&,
                                       const MfsConfig&);
extern template ad::Diff torsion<ad::Diff>(geom::GaugeEval<ad::Diff>&, const quad::Quadrature&,
                                           const MfsConfig&);

// Plain-double MFS torsion for an arbitrary star-shaped-in-origin domain
// given explicit boundary samples and an interior quadrature. Used by the
// polygon baseline.
double torsion_from_points(int dim, std::span<const std::array<double, 3>> sources,
                           std::span<const std::array<double, 3>> collocation,
                           std::span<const std::array<double, 3>> interior_nodes,
                           std::span<const double> interior_weights);

} // namespace shapediag::pde

#endif
