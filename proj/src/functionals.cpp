#include "shapediag/fn/functionals.hpp"

#include "shapediag/ad/linalg.hpp"

namespace shapediag::fn {

const char* functional_name(Functional f) {
    switch (f) {
        case Functional::Vol: return "vol";
        case Functional::Per: return "per";
        case Functional::W: return "w";
        case Functional::E: return "e";
        case Functional::T: return "t";
        case Functional::Mu1: return "mu1";
        case Functional::Mu2: return "mu2";
    }
    return "?";
}

ad::Diff max_jacobian_cond(geom::GaugeEval<ad::Diff>& ev, const quad::Quadrature& q) {
    using ad::Diff;
    const int dim = ev.dim();
    Diff best;
    bool first = true;
    geom::SphereJet<Diff> jet;
    std::array<Diff, 3> phi;
    std::array<Diff, 9> dphi;
    for (size_t i = 0; i < q.volume_nodes.size(); ++i) {
        const auto& x = q.volume_nodes[i];
        Diff jac;
        ev.volume_point_jet(x.data(), 1, jet, phi, jac);
        double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        double nhat[3] = {x[0] / r, x[1] / r, x[2] / r};
        ev.spatial_jacobian(jet, nhat, dphi.data());
        ad::DiffMatrix m(dim, dim, jet.q.tape);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) m.set(a, b, dphi[a * dim + b]);
        auto sv = ad::singular_values(m);
        Diff cond = sv.front() / sv.back();
        if (first) {
            best = cond;
            first = false;
        } else {
            best = ad::max(best, cond);
        }
    }
    return best;
}

double max_jacobian_cond(geom::GaugeEval<double>& ev, const quad::Quadrature& q) {
    const int dim = ev.dim();
    double best = 1.0;
    geom::SphereJet<double> jet;
    std::array<double, 3> phi;
    std::array<double, 9> dphi;
    for (const auto& x : q.volume_nodes) {
        double jac;
        ev.volume_point_jet(x.data(), 1, jet, phi, jac);
        double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        double nhat[3] = {x[0] / r, x[1] / r, x[2] / r};
        ev.spatial_jacobian(jet, nhat, dphi.data());
        Eigen::MatrixXd m(dim, dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) m(a, b) = dphi[a * dim + b];
        auto sv = ad::singular_values(m);
        best = std::max(best, sv.front() / sv.back());
    }
    return best;
}


} // namespace shapediag::fn
