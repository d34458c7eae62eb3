#ifndef SHAPEDIAG_PDE_RBF_GALERKIN_HPP
#define SHAPEDIAG_PDE_RBF_GALERKIN_HPP

#include <memory>

#include "shapediag/fn/functionals.hpp"

namespace shapediag::pde {

// Gaussian RBF-Galerkin discretization of the Neumann eigenproblem pulled
// back to the reference ball:
//   K_ij = int_B A_theta grad(psi_i) . grad(psi_j),  M_ij = int_B jac psi_i psi_j
// with A_theta = jac * Dphi^-1 Dphi^-T. The basis is the constant function
// plus Gaussians exp(-(eps r)^2) at lattice centers (plus a boundary ring),
// so the mu_0 = 0 constant mode is exact. The generalized problem is reduced
// by Cholesky to L^-1 K L^-T and solved with sym_eig.
struct RbfConfig {
    double center_spacing = 0.15;
    // kernel value at nearest-center spacing; fixes the shape parameter
    // via eps = sqrt(ln(1/value))/spacing
    double kernel_value_at_spacing = 0.7;
    double mass_jitter = 1e-10;
    bool boundary_ring = true;

    static RbfConfig standard(int /*dim*/) { return RbfConfig{}; }
    void validate() const;
};

struct ConstantModeNotResolved : std::runtime_error {
    ConstantModeNotResolved()
        : std::runtime_error("constant mode not resolved; refine centers") {}
};
struct MassNotSpd : std::runtime_error {
    MassNotSpd() : std::runtime_error("mass matrix not SPD") {}
};

// Precomputed quadrature/basis coupling, independent of the network
// parameters; shared across particles and iterations. Keyed to one
// (quadrature, config) pair.
class RbfPlan {
public:
    static std::shared_ptr<const RbfPlan> build(const quad::Quadrature& q, const RbfConfig& cfg);

    int dim() const { return dim_; }
    int n_basis() const { return n_basis_; }
    size_t coupling_bytes() const;

    struct Pair {
        int i, j;          // basis indices, i <= j
        int64_t off, len;  // range into the entry arrays
    };

    // entry arrays, parallel: node index + coefficient of each packed
    // A entry (dim*(dim+1)/2 of them) and of jac (mass term)
    std::vector<Pair> pairs;
    std::vector<int32_t> node_of;
    std::vector<double> kcoef; // len * nsym, grouped per entry
    std::vector<double> mcoef;
    int nsym = 3;
    double eps = 0.0;
    std::vector<quad::Point> centers;

private:
    int dim_ = 2, n_basis_ = 0;
};

struct NeumannPair {
    ad::Diff mu1, mu2;
};
struct NeumannPairValue {
    double mu1, mu2;
};

// The recorded variant keeps a reference to the plan inside the tape, so the
// plan is passed by shared_ptr and outlives the tape by construction.
NeumannPair neumann_eigs(geom::GaugeEval<ad::Diff>& ev, const quad::Quadrature& q,
                         std::shared_ptr<const RbfPlan> plan, const RbfConfig& cfg);
NeumannPairValue neumann_eigs(geom::GaugeEval<double>& ev, const quad::Quadrature& q,
                              const RbfPlan& plan, const RbfConfig& cfg);

} // namespace shapediag::pde

#endif
