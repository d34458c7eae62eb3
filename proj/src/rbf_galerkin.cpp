#include "shapediag/pde/rbf_galerkin.hpp"

#include "shapediag/ad/linalg.hpp"

namespace shapediag::pde {

void RbfConfig::validate() const {
    if (!(center_spacing > 0.0 && center_spacing < 1.0))
        throw std::invalid_argument("RbfConfig: center_spacing in (0,1)");
    if (!(kernel_value_at_spacing > 0.0 && kernel_value_at_spacing < 1.0))
        throw std::invalid_argument("RbfConfig: kernel_value_at_spacing in (0,1)");
    if (!(mass_jitter >= 0.0)) throw std::invalid_argument("RbfConfig: mass_jitter >= 0");
}

size_t RbfPlan::coupling_bytes() const {
    return node_of.size() * sizeof(int32_t) + (kcoef.size() + mcoef.size()) * sizeof(double);
}

std::shared_ptr<const RbfPlan> RbfPlan::build(const quad::Quadrature& q, const RbfConfig& cfg) {
    cfg.validate();
    auto plan = std::make_shared<RbfPlan>();
    const int dim = q.dim;
    plan->dim_ = dim;
    plan->nsym = dim * (dim + 1) / 2;

    // centers: interior lattice (half-cell offset) plus a boundary ring
    {
        std::vector<quad::Point> nodes;
        std::vector<double> w;
        quad::ball_lattice(dim, cfg.center_spacing, nodes, w);
        plan->centers = nodes;
        if (cfg.boundary_ring) {
            std::vector<quad::Point> ring;
            int m = std::max(8, int(std::round((dim == 2 ? 6.283185307179586 : 12.566370614359172) /
                                               (cfg.center_spacing * (dim == 2 ? 1.0 : cfg.center_spacing)))));
            quad::sphere_nodes(dim, m, ring, w);
            plan->centers.insert(plan->centers.end(), ring.begin(), ring.end());
        }
    }
    const int nc = int(plan->centers.size());
    plan->n_basis_ = nc + 1; // constant element first
    plan->eps = std::sqrt(std::log(1.0 / cfg.kernel_value_at_spacing)) / cfg.center_spacing;
    const double e2 = plan->eps * plan->eps;
    const int nsym = plan->nsym;

    // kernel values/gradients per (node, center), kept sparse by a cutoff
    const double cutoff = 1e-10;
    const double r2max = -std::log(cutoff) / e2;
    const size_t nq = q.volume_nodes.size();

    std::vector<std::vector<std::pair<int32_t, int32_t>>> support(nc); // center -> (node, slot)
    std::vector<double> vals;
    std::vector<std::array<double, 3>> grads;
    std::vector<int32_t> snode;
    for (int c = 0; c < nc; ++c) {
        for (size_t m = 0; m < nq; ++m) {
            double d[3], r2 = 0.0;
            for (int k = 0; k < dim; ++k) {
                d[k] = q.volume_nodes[m][k] - plan->centers[c][k];
                r2 += d[k] * d[k];
            }
            if (r2 > r2max) continue;
            double v = std::exp(-e2 * r2);
            support[c].push_back({int32_t(m), int32_t(vals.size())});
            vals.push_back(v);
            std::array<double, 3> g{};
            for (int k = 0; k < dim; ++k) g[k] = -2.0 * e2 * d[k] * v;
            grads.push_back(g);
            snode.push_back(int32_t(m));
        }
    }

    // constant-constant: mass = sum w jac over all nodes
    plan->pairs.push_back({0, 0, 0, int64_t(nq)});
    for (size_t m = 0; m < nq; ++m) {
        plan->node_of.push_back(int32_t(m));
        for (int s = 0; s < nsym; ++s) plan->kcoef.push_back(0.0);
        plan->mcoef.push_back(q.volume_weights[m]);
    }
    // constant-gaussian: mass only
    for (int c = 0; c < nc; ++c) {
        int64_t off = int64_t(plan->node_of.size());
        for (auto [m, slot] : support[c]) {
            plan->node_of.push_back(m);
            for (int s = 0; s < nsym; ++s) plan->kcoef.push_back(0.0);
            plan->mcoef.push_back(q.volume_weights[m] * vals[slot]);
        }
        plan->pairs.push_back({0, c + 1, off, int64_t(plan->node_of.size()) - off});
    }
    // gaussian-gaussian: walk the shorter support, binary search the other
    for (int ci = 0; ci < nc; ++ci) {
        for (int cj = ci; cj < nc; ++cj) {
            double dc2 = 0.0;
            for (int k = 0; k < dim; ++k) {
                double d = plan->centers[ci][k] - plan->centers[cj][k];
                dc2 += d * d;
            }
            if (dc2 / 2.0 > r2max) continue; // |x-ci|^2+|x-cj|^2 >= dc2/2
            int64_t off = int64_t(plan->node_of.size());
            const auto& si = support[ci];
            const auto& sj = support[cj];
            size_t a = 0, b = 0;
            while (a < si.size() && b < sj.size()) {
                if (si[a].first < sj[b].first) {
                    ++a;
                } else if (sj[b].first < si[a].first) {
                    ++b;
                } else {
                    int32_t m = si[a].first;
                    int32_t sa = si[a].second, sb = sj[b].second;
                    double w = q.volume_weights[m];
                    plan->node_of.push_back(m);
                    // K coupling: sum over packed entries A_pr * coef_pr
                    for (int p = 0; p < dim; ++p)
                        for (int r = p; r < dim; ++r) {
                            double cpr = grads[sa][p] * grads[sb][r];
                            if (p != r) cpr += grads[sa][r] * grads[sb][p];
                            plan->kcoef.push_back(w * cpr);
                        }
                    plan->mcoef.push_back(w * vals[sa] * vals[sb]);
                    ++a;
                    ++b;
                }
            }
            int64_t len = int64_t(plan->node_of.size()) - off;
            if (len > 0)
                plan->pairs.push_back({ci + 1, cj + 1, off, len});
        }
    }
    return plan;
}

namespace {

// gathers per-node pullback data (packed A entries + jac); layout:
// data[m * (nsym+1) + s], jac last
template <class S>
void pullback_nodes(geom::GaugeEval<S>& ev, const quad::Quadrature& q, int nsym,
                    std::vector<S>& out) {
    const int dim = ev.dim();
    const size_t nq = q.volume_nodes.size();
    out.resize(nq * (nsym + 1));
    geom::SphereJet<S> jet;
    std::array<S, 3> phi;
    std::array<S, 9> a;
    for (size_t m = 0; m < nq; ++m) {
        S jac;
        ev.volume_point_jet(q.volume_nodes[m].data(), 1, jet, phi, jac);
        const auto& x = q.volume_nodes[m];
        double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        double nhat[3] = {x[0] / r, x[1] / r, x[2] / r};
        ev.neumann_pullback(jet, nhat, a.data());
        int s = 0;
        for (int p = 0; p < dim; ++p)
            for (int rr = p; rr < dim; ++rr) out[m * (nsym + 1) + s++] = a[p * dim + rr];
        out[m * (nsym + 1) + nsym] = jac;
    }
}

// recorded assembly: one record producing all packed K then M entries
struct GalerkinRec final : ad::MatRec {
    std::shared_ptr<const RbfPlan> plan;
    std::vector<int64_t> in_ids; // node ids, layout as pullback_nodes
    std::vector<int64_t> outs;   // packed K entries then packed M entries
    void backward(ad::Tape& t) const override {
        const int nsym = plan->nsym;
        const size_t npairs = plan->pairs.size();
        for (size_t p = 0; p < npairs; ++p) {
            const auto& pr = plan->pairs[p];
            double kbar = t.adjoint(outs[p]);
            double mbar = t.adjoint(outs[npairs + p]);
            if (kbar == 0.0 && mbar == 0.0) continue;
            for (int64_t e = pr.off; e < pr.off + pr.len; ++e) {
                int32_t m = plan->node_of[e];
                const double* kc = plan->kcoef.data() + e * nsym;
                if (kbar != 0.0)
                    for (int s = 0; s < nsym; ++s)
                        t.adjoint_mut(in_ids[size_t(m) * (nsym + 1) + s]) += kbar * kc[s];
                if (mbar != 0.0)
                    t.adjoint_mut(in_ids[size_t(m) * (nsym + 1) + nsym]) += mbar * plan->mcoef[e];
            }
        }
    }
    const char* name() const override { return "rbf-galerkin-assembly"; }
};

ad::DiffMatrix transpose_view(const ad::DiffMatrix& m) {
    ad::DiffMatrix t(m.cols, m.rows, m.tape);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) t.ix[size_t(c) * m.rows + r] = m.ix[size_t(r) * m.cols + c];
    return t;
}

} // namespace

NeumannPair neumann_eigs(geom::GaugeEval<ad::Diff>& ev, const quad::Quadrature& q,
                         std::shared_ptr<const RbfPlan> plan_ptr, const RbfConfig& cfg) {
    using ad::Diff;
    const RbfPlan& plan = *plan_ptr;
    ad::Tape& tape = *ev.lifted().log_beta.tape;
    const int nsym = plan.nsym;
    const int nb = plan.n_basis();

    std::vector<Diff> data;
    pullback_nodes(ev, q, nsym, data);

    // assemble packed K and M through one record
    auto rec = std::make_unique<GalerkinRec>();
    rec->plan = plan_ptr;
    rec->in_ids.resize(data.size());
    for (size_t k = 0; k < data.size(); ++k) rec->in_ids[k] = data[k].ix;

    const size_t npairs = plan.pairs.size();
    std::vector<double> packed(2 * npairs, 0.0);
    for (size_t p = 0; p < npairs; ++p) {
        const auto& pr = plan.pairs[p];
        double kv = 0.0, mv = 0.0;
        for (int64_t e = pr.off; e < pr.off + pr.len; ++e) {
            int32_t m = plan.node_of[e];
            const double* kc = plan.kcoef.data() + e * nsym;
            const Diff* nodev = &data[size_t(m) * (nsym + 1)];
            for (int s = 0; s < nsym; ++s) kv += kc[s] * nodev[s].v;
            mv += plan.mcoef[e] * nodev[nsym].v;
        }
        packed[p] = kv;
        packed[npairs + p] = mv;
    }
    int64_t first = tape.push_mat_outputs(packed);
    rec->outs.resize(2 * npairs);
    for (size_t k = 0; k < 2 * npairs; ++k) rec->outs[k] = first + int64_t(k);
    rec->first_out = first;
    rec->n_out = int64_t(2 * npairs);
    tape.seal_mat_record(std::move(rec));

    // unpack to full symmetric DiffMatrices (aliased node ids)
    ad::DiffMatrix kmat(nb, nb, &tape), mmat(nb, nb, &tape);
    for (size_t p = 0; p < npairs; ++p) {
        const auto& pr = plan.pairs[p];
        kmat.ix[size_t(pr.i) * nb + pr.j] = first + int64_t(p);
        kmat.ix[size_t(pr.j) * nb + pr.i] = first + int64_t(p);
        mmat.ix[size_t(pr.i) * nb + pr.j] = first + int64_t(npairs + p);
        mmat.ix[size_t(pr.j) * nb + pr.i] = first + int64_t(npairs + p);
    }
    // pairs far beyond the kernel support were pruned: those entries are 0
    Diff zero = tape.lift(Diff(0.0));
    for (auto& id : kmat.ix)
        if (id < 0) id = zero.ix;
    for (auto& id : mmat.ix)
        if (id < 0) id = zero.ix;

    // mass jitter: M += jitter (tr M / n) I
    if (cfg.mass_jitter > 0.0) {
        std::vector<Diff> diag(nb);
        for (int i = 0; i < nb; ++i) diag[i] = mmat(i, i);
        Diff tr = ad::wsum(diag, std::vector<double>(nb, 1.0));
        for (int i = 0; i < nb; ++i)
            mmat.set(i, i, ad::axpy(cfg.mass_jitter / nb, tr, diag[i]));
    }

    ad::DiffMatrix lmat;
    try {
        lmat = ad::cholesky(mmat);
    } catch (const ad::NotPositiveDefinite&) {
        throw MassNotSpd();
    }
    ad::DiffMatrix linv = ad::inverse(lmat);
    ad::DiffMatrix reduced = ad::matmul(ad::matmul(linv, kmat), transpose_view(linv));
    auto eigs = ad::sym_eig(reduced);
    if (!(eigs[0].v <= 1e-3 * std::max(eigs[1].v, 1e-300))) throw ConstantModeNotResolved();
    return NeumannPair{eigs[1], eigs[2]};
}

NeumannPairValue neumann_eigs(geom::GaugeEval<double>& ev, const quad::Quadrature& q,
                              const RbfPlan& plan, const RbfConfig& cfg) {
    const int nsym = plan.nsym;
    const int nb = plan.n_basis();
    std::vector<double> data;
    pullback_nodes(ev, q, nsym, data);

    Eigen::MatrixXd kmat = Eigen::MatrixXd::Zero(nb, nb), mmat = Eigen::MatrixXd::Zero(nb, nb);
    for (const auto& pr : plan.pairs) {
        double kv = 0.0, mv = 0.0;
        for (int64_t e = pr.off; e < pr.off + pr.len; ++e) {
            int32_t m = plan.node_of[e];
            const double* kc = plan.kcoef.data() + e * nsym;
            const double* nodev = &data[size_t(m) * (nsym + 1)];
            for (int s = 0; s < nsym; ++s) kv += kc[s] * nodev[s];
            mv += plan.mcoef[e] * nodev[nsym];
        }
        kmat(pr.i, pr.j) = kmat(pr.j, pr.i) = kv;
        mmat(pr.i, pr.j) = mmat(pr.j, pr.i) = mv;
    }
    if (cfg.mass_jitter > 0.0)
        mmat += (cfg.mass_jitter * mmat.trace() / nb) * Eigen::MatrixXd::Identity(nb, nb);

    Eigen::MatrixXd lmat;
    try {
        lmat = ad::cholesky(mmat);
    } catch (const ad::NotPositiveDefinite&) {
        throw MassNotSpd();
    }
    Eigen::MatrixXd linv = lmat.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(nb, nb));
    Eigen::MatrixXd reduced = linv * kmat * linv.transpose();
    auto eigs = ad::sym_eig(reduced);
    if (!(eigs[0] <= 1e-3 * std::max(eigs[1], 1e-300))) throw ConstantModeNotResolved();
    return NeumannPairValue{eigs[1], eigs[2]};
}

} // namespace shapediag::pde
