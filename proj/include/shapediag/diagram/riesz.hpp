#ifndef SHAPEDIAG_DIAGRAM_RIESZ_HPP
#define SHAPEDIAG_DIAGRAM_RIESZ_HPP

#include <span>

#include "shapediag/diagram/catalogue.hpp"
#include "shapediag/opt/lbfgs.hpp"

namespace shapediag::diagram {

// Interacting-particle sampler: minimize
//   sum_{i != j} (|F_i - F_j|^2 + eps^2)^{-s/2} + alpha sum_i max_B cond(Dphi_i)
// over all particles' parameters with l-BFGS. s > 2 keeps the minimizers
// spreading over the (2D) diagram.
struct SamplerConfig {
    int n_particles = 64;
    uint64_t seed = 1;
    double riesz_s = 3.0;
    double alpha = 1e-4;
    double eps_dist = 1e-9;
    int n_dirs = 0;        // 0: 16 (2D) / 48 (3D)
    double init_scale = 1.0;
    double quad_h = 0.0;   // 0: 0.01 (2D) / 0.05 (3D)
    int quad_boundary = 0; // 0: 512 (2D) / 2048 (3D)
    double bound_tol = 0.02;
    opt::LbfgsOptions lbfgs;
    pde::MfsConfig mfs;
    pde::RbfConfig rbf;

    void resolve(int dim);
    void validate() const;
};

struct DiagramResult {
    DiagramId id = DiagramId::VPW2;
    int dim = 2;
    struct Row {
        int particle_id = 0;
        double x = 0.0, y = 0.0;
        FunctionalSet<double> raw;
    };
    std::vector<Row> points;
    std::vector<geom::GaugeNetwork> nets;
    geom::SymmetryGroup group = geom::SymmetryGroup::trivial(2);
    struct LogEntry {
        int iter;
        double loss, grad_norm;
    };
    std::vector<LogEntry> log;
    bool converged = false;
    std::string message;
    int bound_violations = 0;
    double final_loss = 0.0;
    int iterations = 0;
};

DiagramResult run_sampler(DiagramId id, const SamplerConfig& cfg);

// pairwise Riesz energy of a point cloud: sum over ordered pairs of
// (|y_i-y_j|^2 + eps^2)^{-s/2}; throws naming the closest pair if the sum
// is not finite
double riesz_energy(std::span<const std::pair<double, double>> pts, double s, double eps);

// single-tape loss of a small particle system (test/inspection path; the
// sampler itself records one tape per particle)
ad::Diff riesz_loss(std::span<const geom::GaugeBody> bodies, DiagramId id, const EvalContext& ctx,
                    double s, double alpha, double eps, ad::Tape& tape);

// nearest-neighbor statistics used by the uniformity checks
struct SpreadStats {
    double min_pair_distance = 0.0;
    double nn_mean = 0.0;
    double nn_cov = 0.0; // coefficient of variation of nearest-neighbor distances
};
SpreadStats spread_stats(std::span<const std::pair<double, double>> pts);

} // namespace shapediag::diagram

#endif
