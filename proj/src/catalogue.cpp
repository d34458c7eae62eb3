#include "shapediag/diagram/catalogue.hpp"

namespace shapediag::diagram {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* diagram_name(DiagramId id) {
    switch (id) {
        case DiagramId::VPW2: return "VPW2";
        case DiagramId::VPW2_SYM: return "VPW2_SYM";
        case DiagramId::VPW3: return "VPW3";
        case DiagramId::VPT2: return "VPT2";
        case DiagramId::VMU2: return "VMU2";
        case DiagramId::VPE2: return "VPE2";
        case DiagramId::VPE3: return "VPE3";
    }
    return "?";
}

std::optional<DiagramId> diagram_from_name(const std::string& name) {
    for (DiagramId id : {DiagramId::VPW2, DiagramId::VPW2_SYM, DiagramId::VPW3, DiagramId::VPT2,
                         DiagramId::VMU2, DiagramId::VPE2, DiagramId::VPE3})
        if (name == diagram_name(id)) return id;
    return std::nullopt;
}

int diagram_dim(DiagramId id) {
    switch (id) {
        case DiagramId::VPW3:
        case DiagramId::VPE3: return 3;
        default: return 2;
    }
}

bool diagram_symmetric(DiagramId id) { return id == DiagramId::VPW2_SYM; }

std::vector<fn::Functional> diagram_needs(DiagramId id) {
    using fn::Functional;
    switch (id) {
        case DiagramId::VPW2:
        case DiagramId::VPW2_SYM:
        // W's pass also yields Vol; listing W first avoids a second sweep
        case DiagramId::VPW3: return {Functional::W, Functional::Per, Functional::Vol};
        case DiagramId::VPT2: return {Functional::Vol, Functional::Per, Functional::T};
        case DiagramId::VMU2: return {Functional::Vol, Functional::Mu1, Functional::Mu2};
        case DiagramId::VPE2:
        case DiagramId::VPE3: return {Functional::Vol, Functional::Per, Functional::E};
    }
    return {};
}

template <class S>
void compose(DiagramId id, const FunctionalSet<S>& f, S& x, S& y) {
    using ad::pow;
    using ad::sqrt;
    switch (id) {
        case DiagramId::VPW2:
        case DiagramId::VPW2_SYM:
            // x = Vol^2/(2 pi W), y = 4 pi Vol / Per^2
            x = (*f.vol * *f.vol) / (S(2.0 * kPi) * *f.w);
            y = S(4.0 * kPi) * *f.vol / (*f.per * *f.per);
            return;
        case DiagramId::VPW3:
            // x = (3/4)^{5/3} (4/(5 pi^{2/3})) Vol^{5/3} / W, y = 6 sqrt(pi) Vol / Per^{3/2}
            x = S(std::pow(0.75, 5.0 / 3.0) * 4.0 / (5.0 * std::pow(kPi, 2.0 / 3.0))) *
                pow(*f.vol, 5.0 / 3.0) / *f.w;
            y = S(6.0 * std::sqrt(kPi)) * *f.vol / pow(*f.per, 1.5);
            return;
        case DiagramId::VPT2:
            // x = 2 sqrt(pi) sqrt(Vol)/Per, y = 8 pi T / Vol^2  (T(B) = pi/8)
            x = S(2.0 * std::sqrt(kPi)) * sqrt(*f.vol) / *f.per;
            y = S(8.0 * kPi) * *f.t / (*f.vol * *f.vol);
            return;
        case DiagramId::VMU2: {
            // x = Vol mu1 / (pi j'^2), y = Vol mu2 / (2 pi j'^2)
            double mu1_ball = kBesselJ1PrimeRoot * kBesselJ1PrimeRoot;
            x = *f.vol * *f.mu1 / S(kPi * mu1_ball);
            y = *f.vol * *f.mu2 / S(2.0 * kPi * mu1_ball);
            return;
        }
        case DiagramId::VPE2:
            // x = 4 pi Vol / Per^2, y = 2 pi^2 / (Per E)
            x = S(4.0 * kPi) * *f.vol / (*f.per * *f.per);
            y = S(2.0 * kPi * kPi) / (*f.per * *f.e);
            return;
        case DiagramId::VPE3:
            // x = 36 pi Vol^2 / Per^3, y = 4 pi / E
            x = S(36.0 * kPi) * (*f.vol * *f.vol) / pow(*f.per, 3.0);
            y = S(4.0 * kPi) / *f.e;
            return;
    }
}

template void compose<double>(DiagramId, const FunctionalSet<double>&, double&, double&);
template void compose<ad::Diff>(DiagramId, const FunctionalSet<ad::Diff>&, ad::Diff&, ad::Diff&);

namespace {
double polya_upper(double x) { return kPi * kPi / 6.0 * x; }
double polya_conj_lower(double x) { return 2.0 * kPi * kPi / 27.0 * x; }
double sym_lower(double x) { return kPi * kPi / 12.0 * x; }
double makai_upper(double x) { return 4.0 / 3.0 * x * x; }
double polya_lower_t(double x) { return 2.0 / 3.0 * x * x; }
double szego_curve(double x) { return x / (4.0 * x - 2.0); }
double half_x(double x) { return 0.5 * x; }
double identity_line(double x) { return x; }
} // namespace

std::vector<BoundCurve> bound_curves(DiagramId id) {
    switch (id) {
        case DiagramId::VPW2:
            return {{"polya", 0.0, 6.0 / (kPi * kPi), &polya_upper},
                    {"polya-conjecture", 0.0, 1.0, &polya_conj_lower}};
        case DiagramId::VPW2_SYM:
            return {{"polya", 0.0, 6.0 / (kPi * kPi), &polya_upper},
                    {"symmetric-lower", 0.0, 1.0, &sym_lower}};
        case DiagramId::VPW3: return {};
        case DiagramId::VPT2:
            return {{"makai", 0.0, std::sqrt(0.75), &makai_upper},
                    {"polya", 0.0, 1.0, &polya_lower_t}};
        case DiagramId::VMU2:
            return {{"ordering", 0.0, 1.0, &half_x}, {"szego", 0.55, 1.0, &szego_curve}};
        case DiagramId::VPE2: return {{"gage", 0.0, 1.0, &identity_line}};
        case DiagramId::VPE3: return {};
    }
    return {};
}

bool bounds_ok(DiagramId id, double x, double y, double tol) {
    if (!(x > -tol && y > -tol)) return false;
    switch (id) {
        case DiagramId::VPW2:
        case DiagramId::VPW2_SYM:
        case DiagramId::VPW3:
            if (x > 1.0 + tol || y > 1.0 + tol) return false;
            if (diagram_dim(id) == 2 && !(y < polya_upper(x) + tol)) return false;
            if (id == DiagramId::VPW2_SYM && !(y >= sym_lower(x) - tol)) return false;
            return true;
        case DiagramId::VPT2:
            return y >= polya_lower_t(x) - tol && y <= makai_upper(x) + tol && x <= 1.0 + tol &&
                   y <= 1.0 + tol;
        case DiagramId::VMU2:
            if (x > 1.0 + tol || y > 1.0 + tol) return false;
            if (!(x <= 2.0 * y + tol)) return false;
            if (x > 0.5 + tol && !(y <= szego_curve(x) + tol)) return false;
            return true;
        case DiagramId::VPE2: return y <= x + tol && x <= 1.0 + tol;
        case DiagramId::VPE3: return x <= 1.0 + tol && y <= 1.0 + tol;
    }
    return false;
}

namespace {
template <class S, class Ev>
FunctionalSet<S> evaluate_set(DiagramId id, Ev& ev, const EvalContext& ctx) {
    FunctionalSet<S> out;
    const quad::Quadrature& q = *ctx.quad;
    for (fn::Functional f : diagram_needs(id)) {
        switch (f) {
            case fn::Functional::Vol:
                if (!out.vol) out.vol = fn::volume(ev, q);
                break;
            case fn::Functional::Per: out.per = fn::perimeter(ev, q); break;
            case fn::Functional::W: {
                auto ci = fn::centroid_and_inertia(ev, q);
                out.w = ci.inertia;
                out.vol = ci.volume; // shares the same pass
                break;
            }
            case fn::Functional::E: out.e = fn::willmore(ev, q); break;
            case fn::Functional::T: out.t = pde::torsion(ev, q, ctx.mfs); break;
            case fn::Functional::Mu1:
            case fn::Functional::Mu2: {
                if (out.mu1) break;
                if (!ctx.rbf_plan) throw std::logic_error("diagram_point: missing RBF plan");
                if constexpr (std::is_same_v<S, double>) {
                    auto mu = pde::neumann_eigs(ev, q, *ctx.rbf_plan, ctx.rbf);
                    out.mu1 = mu.mu1;
                    out.mu2 = mu.mu2;
                } else {
                    auto mu = pde::neumann_eigs(ev, q, ctx.rbf_plan, ctx.rbf);
                    out.mu1 = mu.mu1;
                    out.mu2 = mu.mu2;
                }
                break;
            }
        }
    }
    return out;
}
} // namespace

DiagramPoint diagram_point(DiagramId id, const geom::GaugeBody& body, const EvalContext& ctx) {
    if (body.net.dim != diagram_dim(id))
        throw std::invalid_argument("diagram_point: body dimension does not match the diagram");
    auto lifted = geom::lift_params(body);
    geom::GaugeEval<double> ev(lifted);
    DiagramPoint p;
    p.raw = evaluate_set<double>(id, ev, ctx);
    compose(id, p.raw, p.x, p.y);
    return p;
}

DiagramPointDiff diagram_point_diff(DiagramId id, geom::GaugeEval<ad::Diff>& ev,
                                    const EvalContext& ctx) {
    DiagramPointDiff p;
    p.raw = evaluate_set<ad::Diff>(id, ev, ctx);
    compose(id, p.raw, p.x, p.y);
    return p;
}

} // namespace shapediag::diagram
