#ifndef SHAPEDIAG_GEOM_GAUGE_HPP
#define SHAPEDIAG_GEOM_GAUGE_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "shapediag/ad/tape.hpp"

namespace shapediag::geom {

struct GaugeNotPositive : std::runtime_error {
    GaugeNotPositive() : std::runtime_error("gauge not positive (directions do not positively span)") {}
};

// Finite group of orthogonal matrices. Always contains the identity.
struct SymmetryGroup {
    int dim = 2;
    std::vector<Eigen::Matrix3d> elements; // dim x dim block used

    static SymmetryGroup trivial(int dim);
    // {(x,y) -> (±x, ±y)}: horizontal and vertical reflection symmetries
    static SymmetryGroup axis_reflections_2d();

    // identity present, elements orthogonal, closed under product and
    // inverse, all to tolerance 1e-12
    void validate() const;

    bool is_trivial() const { return elements.size() <= 1; }
};

// Smooth sublinear gauge p(x) = beta * |x| * LSE(W^T x/|x|). The represented
// convex body is { p < 1 } = phi(B) with phi(x) = x * |x| / p(x).
struct GaugeNetwork {
    int dim = 2;
    double log_beta = 0.0; // beta stored as its log so positivity is unconditional
    Eigen::MatrixXd W;     // dim x N direction weights, N >= dim+1

    int n_dirs() const { return int(W.cols()); }
    double beta() const { return std::exp(log_beta); }
    int n_params() const { return 1 + dim * n_dirs(); }

    // parameter vector layout: [log_beta, W column-major]
    Eigen::VectorXd pack() const;
    static GaugeNetwork unpack(int dim, int n_dirs, const Eigen::VectorXd& p);
};

// A network together with an averaging symmetry group.
struct GaugeBody {
    GaugeNetwork net;
    SymmetryGroup group;

    GaugeBody() : group(SymmetryGroup::trivial(2)) {}
    explicit GaugeBody(GaugeNetwork n)
        : net(std::move(n)), group(SymmetryGroup::trivial(net.dim)) {}
    GaugeBody(GaugeNetwork n, SymmetryGroup g) : net(std::move(n)), group(std::move(g)) {}
};

// p^G(x) = sum_{g in G} p_theta(g^-1 x); the induced map is G-equivariant.
inline GaugeBody symmetrize(const GaugeNetwork& net, const SymmetryGroup& g) {
    g.validate();
    if (g.dim != net.dim) throw std::invalid_argument("symmetrize: dimension mismatch");
    return GaugeBody(net, g);
}

// min over a dense sphere sample (>= 4096 directions) of the symmetrized
// LSE sum; > 0 certifies the gauge positivity invariant
double min_sphere_gauge(const GaugeBody& body, int samples = 4096);

// W columns = equispaced (2D) / Fibonacci (3D) unit directions plus Gaussian
// jitter sigma = 0.3; beta set so the mean radius is ~scale. Retries with
// halved jitter (up to 5 times) if positivity fails.
GaugeNetwork init_random(int dim, int n_dirs, uint64_t seed, double scale = 1.0);

// ---------------------------------------------------------------------------
// Evaluation. Everything is templated on the scalar type S: `double` for a
// primal-only pass and `ad::Diff` for recorded passes. Spatial derivatives of
// the map are closed-form in theta (never a nested tape):
//
//   q(x) := sum_g beta * LSE(W^T (g^-1 x)/|x|)   (0-homogeneous)
//   phi(x) = x / q,      det D(phi) = q^-dim     (exactly)
//   Dphi = I/q - nhat grad^T / q^2,  (Dphi)^-1 = q I + nhat grad^T
//   surface element = q^-dim * |v|,  v = q nhat + grad
//   mean curvature from Dv = q P + nhat grad^T + grad nhat^T + hess
// where grad/hess are the ambient gradient/Hessian of q at nhat.
// ---------------------------------------------------------------------------

template <class S>
struct SphereJet {
    S q;
    std::array<S, 3> grad{};
    std::array<S, 9> hess{}; // row-major dim x dim
};

template <class S>
struct BoundaryPoint {
    std::array<S, 3> phi{};
    S q;
    S surf_jac;              // q^-d |v|
    std::array<S, 3> normal{};
    S mean_curvature;        // filled when requested
};

// Lifted parameters on a tape (or plain doubles). Column-major W entries.
template <class S>
struct LiftedGauge {
    int dim = 2, n = 0;
    S log_beta;
    std::vector<S> w; // w[i*dim + d]
    S beta;
    const SymmetryGroup* group = nullptr;
};

// The lifted view references the body's symmetry group; the body must
// outlive it (rvalues rejected).
LiftedGauge<ad::Diff> lift_params(ad::Tape& tape, const GaugeBody& body);
LiftedGauge<double> lift_params(const GaugeBody& body);
LiftedGauge<ad::Diff> lift_params(ad::Tape&, GaugeBody&&) = delete;
LiftedGauge<double> lift_params(GaugeBody&&) = delete;

// Evaluator bound to a lifted gauge; holds scratch buffers so per-node
// evaluation does not allocate.
template <class S>
class GaugeEval {
public:
    using Scalar = S;

    explicit GaugeEval(const LiftedGauge<S>& g) : g_(g) {}

    const LiftedGauge<S>& lifted() const { return g_; }
    int dim() const { return g_.dim; }

    // jet of q at unit direction nhat; level: 0 = q, 1 = +grad, 2 = +hess
    void sphere_jet(const double* nhat, int level, SphereJet<S>& out);

    // p(x) for x != 0
    S gauge_value(const double* x);

    // phi(x) = x/q and the volume factor jac = q^-d, at any x != 0
    void volume_point(const double* x, std::array<S, 3>& phi, S& jac);
    // variant that also returns the jet (for A_theta / Dphi consumers)
    void volume_point_jet(const double* x, int level, SphereJet<S>& jet,
                          std::array<S, 3>& phi, S& jac);

    // Dphi entries (row-major dim x dim) from a level>=1 jet at nhat
    void spatial_jacobian(const SphereJet<S>& jet, const double* nhat, S* dphi);

    // A = jac * Dphi^-1 Dphi^-T entries (row-major, symmetric)
    void neumann_pullback(const SphereJet<S>& jet, const double* nhat, S* a);

    // boundary data at a unit direction; with_curvature requires level 2
    void boundary_point(const double* nhat, bool with_curvature, BoundaryPoint<S>& out);

private:
    void single_jet(const double* y, int level, SphereJet<S>& out);

    const LiftedGauge<S>& g_;
    // scratch
    std::vector<S> z_;
    std::vector<double> sigma_;
    std::vector<int64_t> ids_;
    std::vector<double> parts_;
};

extern template class GaugeEval<double>;
extern template class GaugeEval<ad::Diff>;

// ---------------------------------------------------------------------------
// Boundary sampling and shape export helpers (plain double).

// boundary polyline over `count` equispaced angles (2D)
std::vector<std::array<double, 2>> boundary_polyline(const GaugeBody& body, int count);

// boundary mesh over Fibonacci directions (3D); triangles from the convex
// hull of the reference directions
struct TriMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> triangles;
};
TriMesh boundary_mesh(const GaugeBody& body, int count);

// support-function Hausdorff estimate between two sampled convex bodies
double hausdorff_support(const std::vector<std::array<double, 2>>& a,
                         const std::vector<std::array<double, 2>>& b, int directions = 4096);

} // namespace shapediag::geom

#endif
