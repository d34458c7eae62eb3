#ifndef SHAPEDIAG_DIAGRAM_CATALOGUE_HPP
#define SHAPEDIAG_DIAGRAM_CATALOGUE_HPP

#include <optional>
#include <string>

#include "shapediag/fn/functionals.hpp"
#include "shapediag/pde/mfs.hpp"
#include "shapediag/pde/rbf_galerkin.hpp"

namespace shapediag::diagram {

enum class DiagramId { VPW2, VPW2_SYM, VPW3, VPT2, VMU2, VPE2, VPE3 };

const char* diagram_name(DiagramId id);
std::optional<DiagramId> diagram_from_name(const std::string& name);
int diagram_dim(DiagramId id);
bool diagram_symmetric(DiagramId id);
std::vector<fn::Functional> diagram_needs(DiagramId id);

// first positive root of J_1'; mu_1(unit disk) = j'_{1,1}^2
inline constexpr double kBesselJ1PrimeRoot = 1.8411837813406593;

// raw functional values; only the entries a diagram needs are filled
template <class S>
struct FunctionalSet {
    std::optional<S> vol, per, w, e, t, mu1, mu2;
};

// scale-invariant coordinates; both in (0,1] up to solver tolerance for the
// diagrams the paper normalizes to the unit square
template <class S>
void compose(DiagramId id, const FunctionalSet<S>& f, S& x, S& y);

extern template void compose<double>(DiagramId, const FunctionalSet<double>&, double&, double&);
extern template void compose<ad::Diff>(DiagramId, const FunctionalSet<ad::Diff>&, ad::Diff&,
                                       ad::Diff&);

// known bounding curves, for plotting and membership tests
struct BoundCurve {
    std::string label;
    double x0, x1;
    double (*y_of_x)(double);
};
std::vector<BoundCurve> bound_curves(DiagramId id);

// hard-bound membership with reporting tolerance (diagram units)
bool bounds_ok(DiagramId id, double x, double y, double tol);

// Everything a diagram evaluation needs besides the body.
struct EvalContext {
    const quad::Quadrature* quad = nullptr;
    pde::MfsConfig mfs;
    pde::RbfConfig rbf;
    std::shared_ptr<const pde::RbfPlan> rbf_plan; // built lazily for VMU2
};

struct DiagramPoint {
    double x = 0.0, y = 0.0;
    FunctionalSet<double> raw;
};

// primal evaluation of one body
DiagramPoint diagram_point(DiagramId id, const geom::GaugeBody& body, const EvalContext& ctx);

// recorded evaluation: returns (x, y) plus the filled functional set
struct DiagramPointDiff {
    ad::Diff x, y;
    FunctionalSet<ad::Diff> raw;
};
DiagramPointDiff diagram_point_diff(DiagramId id, geom::GaugeEval<ad::Diff>& ev,
                                    const EvalContext& ctx);

} // namespace shapediag::diagram

#endif
