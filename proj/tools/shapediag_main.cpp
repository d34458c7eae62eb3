// shapediag: uniform sampling of shape-functional diagrams over smooth
// gauge-parametrized convex bodies, with a random-polygon baseline.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "shapediag/geom/fit.hpp"
#include "shapediag/io/run_io.hpp"
#include "shapediag/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace shapediag;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNonConverged = 3;

std::vector<std::array<double, 2>> load_target(const std::string& spec) {
    if (spec == "circle") {
        std::vector<std::array<double, 2>> t;
        for (int k = 0; k < 256; ++k) {
            double a = 2.0 * M_PI * k / 256;
            t.push_back({std::cos(a), std::sin(a)});
        }
        return t;
    }
    if (spec == "square") {
        std::vector<std::array<double, 2>> t;
        for (int k = 0; k < 128; ++k) {
            double u = -1.0 + 2.0 * (k + 0.5) / 128;
            t.push_back({u, -1.0});
            t.push_back({1.0, u});
            t.push_back({-u, 1.0});
            t.push_back({-1.0, -u});
        }
        return t;
    }
    if (spec == "triangle") {
        std::vector<std::array<double, 2>> t;
        double v[3][2] = {{1.1, -0.6}, {0.0, 1.2}, {-1.1, -0.6}};
        for (int e = 0; e < 3; ++e)
            for (int k = 0; k < 85; ++k) {
                double u = (k + 0.5) / 85;
                t.push_back({v[e][0] + u * (v[(e + 1) % 3][0] - v[e][0]),
                             v[e][1] + u * (v[(e + 1) % 3][1] - v[e][1])});
            }
        return t;
    }
    std::ifstream in(spec);
    if (!in) throw io::ConfigError("cannot open target file '" + spec + "'");
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<std::array<double, 2>> t;
    for (const auto& p : j) t.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return t;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"explore shape-functional diagrams with gauge-network convex bodies"};
    app.require_subcommand(1);

    // ---- sample ----
    auto* sample = app.add_subcommand("sample", "run the interacting-particle sampler");
    std::string diagram, config_path, out_dir;
    io::RunConfig cfg;
    sample->add_option("diagram", diagram, "diagram id (VPW2, VPW2_SYM, VPW3, VPT2, VMU2, VPE2, VPE3)")
        ->required();
    sample->add_option("--config", config_path, "JSON config file");
    auto* o_n = sample->add_option("--n", cfg.n, "number of particles");
    auto* o_seed = sample->add_option("--seed", cfg.seed, "random seed");
    auto* o_out = sample->add_option("--out", out_dir, "output directory");
    auto* o_qh = sample->add_option("--quad-h", cfg.quad_h, "volume lattice spacing");
    auto* o_qb = sample->add_option("--quad-boundary", cfg.quad_boundary, "boundary node count");
    auto* o_iter = sample->add_option("--max-iterations", cfg.max_iterations, "l-BFGS iteration cap");
    auto* o_s = sample->add_option("--s", cfg.s, "Riesz exponent");
    auto* o_alpha = sample->add_option("--alpha", cfg.alpha, "condition-number regularizer weight");
    auto* o_dirs = sample->add_option("--n-dirs", cfg.n_dirs, "gauge directions per particle");
    auto* o_tol = sample->add_option("--grad-tol", cfg.grad_tol, "gradient tolerance");

    // ---- baseline ----
    auto* base = app.add_subcommand("baseline", "random convex polygon Monte-Carlo baseline");
    std::string bdiagram, bout = "baseline_out";
    int bsamples = 10000, nmin = 3, nmax = 30;
    uint64_t bseed = 1;
    base->add_option("diagram", bdiagram, "diagram id (VPW2 or VPT2)")->required();
    base->add_option("--samples", bsamples, "sample count");
    base->add_option("--seed", bseed, "random seed");
    base->add_option("--out", bout, "output directory");
    base->add_option("--n-min", nmin, "minimum vertex count");
    base->add_option("--n-max", nmax, "maximum vertex count");

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "fit a gauge network to a target boundary");
    std::string target, fout = "fit_out";
    geom::FitOptions fopts;
    fit->add_option("target", target, "target: circle|square|triangle or a JSON [[x,y],...] file")
        ->required();
    fit->add_option("--n-dirs", fopts.n_dirs, "gauge directions");
    fit->add_option("--seed", fopts.seed, "random seed");
    fit->add_option("--max-iterations", fopts.max_iterations, "l-BFGS iteration cap");
    fit->add_option("--out", fout, "output directory");

    // ---- check ----
    auto* check = app.add_subcommand("check", "run the invariant suites");
    std::string module;
    check->add_option("--module", module, "restrict to one module");

    // ---- export ----
    auto* exp = app.add_subcommand("export", "re-render artifacts from a stored run");
    std::string run_dir, eout;
    exp->add_option("--run", run_dir, "stored run directory")->required();
    exp->add_option("--out", eout, "output directory (default: the run directory)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample) {
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw io::ConfigError("cannot open config '" + config_path + "'");
                std::stringstream ss;
                ss << in.rdbuf();
                io::RunConfig file_cfg = io::RunConfig::from_json_text(ss.str());
                // explicit flags override the file
                io::RunConfig flags = cfg;
                cfg = file_cfg;
                if (o_n->count()) cfg.n = flags.n;
                if (o_seed->count()) cfg.seed = flags.seed;
                if (o_qh->count()) cfg.quad_h = flags.quad_h;
                if (o_qb->count()) cfg.quad_boundary = flags.quad_boundary;
                if (o_iter->count()) cfg.max_iterations = flags.max_iterations;
                if (o_s->count()) cfg.s = flags.s;
                if (o_alpha->count()) cfg.alpha = flags.alpha;
                if (o_dirs->count()) cfg.n_dirs = flags.n_dirs;
                if (o_tol->count()) cfg.grad_tol = flags.grad_tol;
            }
            cfg.diagram = diagram;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            cfg.validate();
            diagram::DiagramResult res = diagram::run_sampler(cfg.diagram_id(), cfg.sampler_config());
            io::write_run(cfg.out_dir, cfg, res);
            std::cout << "wrote " << res.points.size() << " points to " << cfg.out_dir
                      << " (loss " << res.final_loss << ", " << res.iterations << " iterations, "
                      << res.bound_violations << " bound violations)\n";
            if (!res.converged) {
                std::cerr << "riesz-sampler: non-converged: " << res.message
                          << " (partial artifacts written)\n";
                return kExitNonConverged;
            }
            return 0;
        }
        if (*base) {
            auto id = diagram::diagram_from_name(bdiagram);
            if (!id || (*id != diagram::DiagramId::VPW2 && *id != diagram::DiagramId::VPT2))
                throw io::ConfigError("baseline diagram must be VPW2 or VPT2");
            if (bsamples < 0) throw io::ConfigError("samples must be >= 0");
            auto mc = baseline::monte_carlo_diagram(*id, bsamples, bseed, nmin, nmax);
            io::write_baseline(bout, *id, bseed, bsamples, mc);
            std::cout << "wrote " << mc.points.size() << " baseline points to " << bout << " ("
                      << mc.skipped << " skipped)\n";
            return 0;
        }
        if (*fit) {
            auto pts = load_target(target);
            geom::FitResult r = geom::fit_to_target(pts, fopts);
            fs::create_directories(fout);
            std::ofstream net(fs::path(fout) / "net.json");
            nlohmann::json j;
            j["dim"] = r.net.dim;
            j["log_beta"] = r.net.log_beta;
            j["W"] = std::vector<std::vector<double>>();
            for (int c = 0; c < r.net.W.cols(); ++c)
                j["W"].push_back({r.net.W(0, c), r.net.W(1, c)});
            j["hausdorff"] = r.hausdorff;
            j["mse"] = r.mse;
            net << j.dump(2) << "\n";
            std::ofstream shape(fs::path(fout) / "boundary.json");
            shape << io::polyline_json(geom::boundary_polyline(geom::GaugeBody(r.net), 512));
            std::cout << "fit: mse " << r.mse << ", hausdorff " << r.hausdorff << " ("
                      << r.opt.message << ")\n";
            if (r.opt.line_search_failed) {
                std::cerr << "gauge-fit: optimizer stopped early: " << r.opt.message << "\n";
                return kExitNonConverged;
            }
            return 0;
        }
        if (*check) {
            auto results = run_checks(module);
            if (results.empty()) {
                std::cerr << "check: no checks match module '" << module << "'\n";
                return kExitValidation;
            }
            bool all = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "PASS" : "FAIL") << "  [" << r.module << "] " << r.name
                          << "  (" << r.detail << ")\n";
                all = all && r.pass;
            }
            return all ? 0 : 1;
        }
        if (*exp) {
            io::LoadedRun lr = io::load_run(run_dir);
            fs::path out = eout.empty() ? fs::path(run_dir) : fs::path(eout);
            fs::create_directories(out);
            std::ofstream svg(out / "diagram.svg", std::ios::binary);
            svg << io::render_svg(lr.id, lr.rows);
            if (!eout.empty()) {
                std::ofstream csv(out / "points.csv", std::ios::binary);
                csv << lr.points_csv;
                if (!lr.shapes.empty()) fs::create_directories(out / "shapes");
                for (const auto& [name, bytes] : lr.shapes) {
                    std::ofstream sh(out / "shapes" / name, std::ios::binary);
                    sh << bytes;
                }
            }
            std::cout << "re-rendered " << (out / "diagram.svg").string() << "\n";
            return 0;
        }
    } catch (const io::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
