#ifndef SHAPEDIAG_IO_RUN_IO_HPP
#define SHAPEDIAG_IO_RUN_IO_HPP

#include <filesystem>
#include <string>

#include "shapediag/baseline/valtr.hpp"
#include "shapediag/diagram/riesz.hpp"

namespace shapediag::io {

inline constexpr const char* kRunVersion = "1";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// User-facing configuration. All fields validated before any compute;
// unknown keys in a config file are rejected. Zeros mean
// "dimension-dependent default", materialized into run.json.
struct RunConfig {
    std::string diagram = "VPW2";
    int n = 64;
    uint64_t seed = 1;
    // quadrature overrides
    double quad_h = 0.0;
    int quad_boundary = 0;
    // sampler hyperparameters
    double s = 3.0;
    double alpha = 1e-4;
    double eps_dist = 1e-9;
    int n_dirs = 0;
    double init_scale = 1.0;
    // l-BFGS
    int lbfgs_memory = 10;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    double grad_tol = 1e-6;
    int max_iterations = 500;
    double bound_tol = 0.02;
    // PDE configs
    int mfs_sources = 0; // 0: 64 (2D) / 200 (3D)
    int mfs_collocation = 0;
    double mfs_offset = 0.5;
    double rbf_spacing = 0.15;
    double rbf_kernel_value = 0.7;
    double rbf_jitter = 1e-10;
    std::string out_dir = "run_out";

    static RunConfig from_json_text(const std::string& text);
    std::string to_json_text() const; // every default materialized
    void validate() const;

    diagram::DiagramId diagram_id() const;
    diagram::SamplerConfig sampler_config() const;
};

// writes points.csv, run.json, shapes/, diagram.svg
void write_run(const std::filesystem::path& dir, const RunConfig& cfg,
               const diagram::DiagramResult& result);

// baseline artifacts share the points.csv format; SVG drawn as a red overlay
void write_baseline(const std::filesystem::path& dir, diagram::DiagramId id, uint64_t seed,
                    int samples, const baseline::MonteCarloResult& result);

struct LoadedRun {
    RunConfig config;
    std::string points_csv;              // raw bytes (round-trip safe)
    std::vector<diagram::DiagramResult::Row> rows;
    std::vector<std::pair<std::string, std::string>> shapes; // (filename, bytes)
    std::string run_json;
    diagram::DiagramId id;
};

LoadedRun load_run(const std::filesystem::path& dir);

// re-render diagram.svg from a stored run without recomputation
std::string render_svg(diagram::DiagramId id,
                       std::span<const diagram::DiagramResult::Row> rows,
                       std::span<const std::pair<double, double>> overlay_red = {});

// CSV with the fixed column set; absent functionals are empty fields
std::string points_csv(std::span<const diagram::DiagramResult::Row> rows);
std::vector<diagram::DiagramResult::Row> parse_points_csv(const std::string& text);

std::string obj_text(const geom::TriMesh& mesh);
std::string polyline_json(const std::vector<std::array<double, 2>>& pts);

} // namespace shapediag::io

#endif
