#ifndef SHAPEDIAG_GEOM_FIT_HPP
#define SHAPEDIAG_GEOM_FIT_HPP

#include "shapediag/geom/gauge.hpp"
#include "shapediag/opt/lbfgs.hpp"

namespace shapediag::geom {

struct FitOptions {
    int n_dirs = 16;
    uint64_t seed = 1;
    int max_iterations = 800;
    double grad_tol = 1e-10;
};

struct FitResult {
    GaugeNetwork net;
    double mse = 0.0;        // mean squared gauge mismatch at the targets
    double hausdorff = 0.0;  // support-function distance to the target cloud
    opt::LbfgsResult opt;    // optimizer diagnostics
};

// Fit a gauge network to a convex-position boundary point cloud (origin
// strictly inside) by minimizing mean((p_theta(t_k) - 1)^2). 2D only.
FitResult fit_to_target(const std::vector<std::array<double, 2>>& target, const FitOptions& opts);

// convex position check for an ordered polyline: all consecutive-edge cross
// products of one sign up to a noise floor (flat facets of sharp bodies give
// exact zeros in double precision)
bool convex_position(const std::vector<std::array<double, 2>>& pts, double tol = 1e-12);

} // namespace shapediag::geom

#endif
