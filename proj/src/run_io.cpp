#include "shapediag/io/run_io.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace shapediag::io {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

} // namespace

diagram::DiagramId RunConfig::diagram_id() const {
    auto id = diagram::diagram_from_name(diagram);
    if (!id) throw ConfigError("unknown diagram '" + diagram + "'");
    return *id;
}

void RunConfig::validate() const {
    diagram::DiagramId id = diagram_id();
    const int dim = diagram::diagram_dim(id);
    if (n < 2) throw ConfigError("N >= 2 required");
    if (!(s > 2.0)) throw ConfigError("riesz exponent s must be > 2");
    if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
    if (!(eps_dist >= 0.0)) throw ConfigError("eps_dist must be >= 0");
    if (quad_h != 0.0 && !(quad_h > 0.0 && quad_h < 1.0))
        throw ConfigError("quad_h must be in (0,1)");
    if (quad_boundary != 0 && quad_boundary < 8) throw ConfigError("quad_boundary must be >= 8");
    if (n_dirs != 0 && n_dirs < dim + 1) throw ConfigError("n_dirs must be >= dim+1");
    if (lbfgs_memory < 1) throw ConfigError("lbfgs_memory must be >= 1");
    if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
        throw ConfigError("need 0 < c1 < c2 < 1");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (mfs_sources != 0 && mfs_collocation != 0 && mfs_collocation < 2 * mfs_sources)
        throw ConfigError("need mfs_collocation >= 2*mfs_sources");
    if (!(mfs_offset > 0.0)) throw ConfigError("mfs_offset must be > 0");
    if (!(rbf_spacing > 0.0 && rbf_spacing < 1.0)) throw ConfigError("rbf_spacing must be in (0,1)");
    if (!(rbf_kernel_value > 0.0 && rbf_kernel_value < 1.0))
        throw ConfigError("rbf_kernel_value must be in (0,1)");
    if (!(rbf_jitter >= 0.0)) throw ConfigError("rbf_jitter must be >= 0");
}

diagram::SamplerConfig RunConfig::sampler_config() const {
    validate();
    diagram::DiagramId id = diagram_id();
    const int dim = diagram::diagram_dim(id);
    diagram::SamplerConfig sc;
    sc.n_particles = n;
    sc.seed = seed;
    sc.riesz_s = s;
    sc.alpha = alpha;
    sc.eps_dist = eps_dist;
    sc.n_dirs = n_dirs;
    sc.init_scale = init_scale;
    sc.quad_h = quad_h;
    sc.quad_boundary = quad_boundary;
    sc.bound_tol = bound_tol;
    sc.lbfgs.memory = lbfgs_memory;
    sc.lbfgs.c1 = wolfe_c1;
    sc.lbfgs.c2 = wolfe_c2;
    sc.lbfgs.grad_tol = grad_tol;
    sc.lbfgs.max_iterations = max_iterations;
    sc.mfs = pde::MfsConfig::standard(dim);
    if (mfs_sources != 0) sc.mfs.n_sources = mfs_sources;
    if (mfs_collocation != 0) sc.mfs.n_collocation = mfs_collocation;
    sc.mfs.offset = mfs_offset;
    sc.rbf.center_spacing = rbf_spacing;
    sc.rbf.kernel_value_at_spacing = rbf_kernel_value;
    sc.rbf.mass_jitter = rbf_jitter;
    sc.resolve(dim);
    return sc;
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    static const std::set<std::string> known = {
        "diagram", "n", "seed", "quad_h", "quad_boundary", "s", "alpha", "eps_dist",
        "n_dirs", "init_scale", "lbfgs_memory", "wolfe_c1", "wolfe_c2", "grad_tol",
        "max_iterations", "bound_tol", "mfs_sources", "mfs_collocation", "mfs_offset",
        "rbf_spacing", "rbf_kernel_value", "rbf_jitter", "out_dir"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
    RunConfig c;
    try {
        if (j.contains("diagram")) c.diagram = j["diagram"].get<std::string>();
        if (j.contains("n")) c.n = j["n"].get<int>();
        if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
        if (j.contains("quad_h")) c.quad_h = j["quad_h"].get<double>();
        if (j.contains("quad_boundary")) c.quad_boundary = j["quad_boundary"].get<int>();
        if (j.contains("s")) c.s = j["s"].get<double>();
        if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
        if (j.contains("eps_dist")) c.eps_dist = j["eps_dist"].get<double>();
        if (j.contains("n_dirs")) c.n_dirs = j["n_dirs"].get<int>();
        if (j.contains("init_scale")) c.init_scale = j["init_scale"].get<double>();
        if (j.contains("lbfgs_memory")) c.lbfgs_memory = j["lbfgs_memory"].get<int>();
        if (j.contains("wolfe_c1")) c.wolfe_c1 = j["wolfe_c1"].get<double>();
        if (j.contains("wolfe_c2")) c.wolfe_c2 = j["wolfe_c2"].get<double>();
        if (j.contains("grad_tol")) c.grad_tol = j["grad_tol"].get<double>();
        if (j.contains("max_iterations")) c.max_iterations = j["max_iterations"].get<int>();
        if (j.contains("bound_tol")) c.bound_tol = j["bound_tol"].get<double>();
        if (j.contains("mfs_sources")) c.mfs_sources = j["mfs_sources"].get<int>();
        if (j.contains("mfs_collocation")) c.mfs_collocation = j["mfs_collocation"].get<int>();
        if (j.contains("mfs_offset")) c.mfs_offset = j["mfs_offset"].get<double>();
        if (j.contains("rbf_spacing")) c.rbf_spacing = j["rbf_spacing"].get<double>();
        if (j.contains("rbf_kernel_value")) c.rbf_kernel_value = j["rbf_kernel_value"].get<double>();
        if (j.contains("rbf_jitter")) c.rbf_jitter = j["rbf_jitter"].get<double>();
        if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    c.validate();
    return c;
}

std::string RunConfig::to_json_text() const {
    // materialize the dimension-dependent defaults so the run is
    // self-describing
    diagram::SamplerConfig sc = sampler_config();
    const int dim = diagram::diagram_dim(diagram_id());
    json j;
    j["diagram"] = diagram;
    j["n"] = n;
    j["seed"] = seed;
    j["quad_h"] = sc.quad_h;
    j["quad_boundary"] = sc.quad_boundary;
    j["s"] = s;
    j["alpha"] = alpha;
    j["eps_dist"] = eps_dist;
    j["n_dirs"] = sc.n_dirs;
    j["init_scale"] = init_scale;
    j["lbfgs_memory"] = lbfgs_memory;
    j["wolfe_c1"] = wolfe_c1;
    j["wolfe_c2"] = wolfe_c2;
    j["grad_tol"] = grad_tol;
    j["max_iterations"] = max_iterations;
    j["bound_tol"] = bound_tol;
    j["mfs_sources"] = sc.mfs.n_sources;
    j["mfs_collocation"] = sc.mfs.n_collocation;
    j["mfs_offset"] = mfs_offset;
    j["rbf_spacing"] = rbf_spacing;
    j["rbf_kernel_value"] = rbf_kernel_value;
    j["rbf_jitter"] = rbf_jitter;
    j["out_dir"] = out_dir;
    (void)dim;
    return j.dump(2) + "\n";
}

std::string points_csv(std::span<const diagram::DiagramResult::Row> rows) {
    std::ostringstream out;
    out << "particle_id,x,y,vol,per,w,e,t,mu1,mu2\n";
    auto opt = [&](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const auto& r : rows) {
        out << r.particle_id << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
            << opt(r.raw.vol) << ',' << opt(r.raw.per) << ',' << opt(r.raw.w) << ','
            << opt(r.raw.e) << ',' << opt(r.raw.t) << ',' << opt(r.raw.mu1) << ','
            << opt(r.raw.mu2) << '\n';
    }
    return out.str();
}

std::vector<diagram::DiagramResult::Row> parse_points_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "particle_id,x,y,vol,per,w,e,t,mu1,mu2")
        throw std::runtime_error("points.csv: bad or missing header");
    std::vector<diagram::DiagramResult::Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        size_t pos = 0;
        while (true) {
            size_t c = line.find(',', pos);
            f.push_back(line.substr(pos, c == std::string::npos ? c : c - pos));
            if (c == std::string::npos) break;
            pos = c + 1;
        }
        if (f.size() != 10) throw std::runtime_error("points.csv: bad row '" + line + "'");
        diagram::DiagramResult::Row r;
        r.particle_id = std::stoi(f[0]);
        r.x = std::stod(f[1]);
        r.y = std::stod(f[2]);
        auto opt = [](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return std::stod(s);
        };
        r.raw.vol = opt(f[3]);
        r.raw.per = opt(f[4]);
        r.raw.w = opt(f[5]);
        r.raw.e = opt(f[6]);
        r.raw.t = opt(f[7]);
        r.raw.mu1 = opt(f[8]);
        r.raw.mu2 = opt(f[9]);
        rows.push_back(r);
    }
    return rows;
}

std::string render_svg(diagram::DiagramId id, std::span<const diagram::DiagramResult::Row> rows,
                       std::span<const std::pair<double, double>> overlay_red) {
    const int size = 640, margin = 50;
    auto px = [&](double x) { return margin + x * (size - 2 * margin); };
    auto py = [&](double y) { return size - margin - y * (size - 2 * margin); };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
    s << "<rect x=\"" << px(0) << "\" y=\"" << py(1) << "\" width=\"" << px(1) - px(0)
      << "\" height=\"" << py(0) - py(1) << "\" fill=\"none\" stroke=\"#999\"/>\n";
    // bound curves as individual path elements
    for (const auto& c : diagram::bound_curves(id)) {
        s << "<path id=\"bound-" << c.label << "\" fill=\"none\" stroke=\"#333\" d=\"";
        const int steps = 128;
        bool started = false;
        for (int k = 0; k <= steps; ++k) {
            double x = c.x0 + (c.x1 - c.x0) * k / steps;
            double y = c.y_of_x(x);
            if (y < -0.05 || y > 1.25) {
                started = false;
                continue;
            }
            s << (started ? "L" : "M") << px(x) << " " << py(std::min(y, 1.2)) << " ";
            started = true;
        }
        s << "\"/>\n";
    }
    for (const auto& r : rows)
        s << "<circle cx=\"" << px(r.x) << "\" cy=\"" << py(r.y)
          << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    for (const auto& [x, y] : overlay_red)
        s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
          << "\" r=\"1.5\" fill=\"#d62728\"/>\n";
    s << "<text x=\"" << px(0.02) << "\" y=\"" << py(1.05) << "\" font-size=\"14\">"
      << diagram::diagram_name(id) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string obj_text(const geom::TriMesh& mesh) {
    std::ostringstream s;
    for (const auto& v : mesh.vertices)
        s << "v " << format_double(v[0]) << " " << format_double(v[1]) << " "
          << format_double(v[2]) << "\n";
    for (const auto& t : mesh.triangles)
        s << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    return s.str();
}

std::string polyline_json(const std::vector<std::array<double, 2>>& pts) {
    std::ostringstream s;
    s << "[";
    for (size_t i = 0; i < pts.size(); ++i) {
        if (i) s << ",";
        s << "[" << format_double(pts[i][0]) << "," << format_double(pts[i][1]) << "]";
    }
    s << "]\n";
    return s.str();
}

void write_run(const std::filesystem::path& dir, const RunConfig& cfg,
               const diagram::DiagramResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "shapes");
    write_file(dir / "points.csv", points_csv(result.points));

    json run;
    run["version"] = kRunVersion;
    run["diagram"] = diagram::diagram_name(result.id);
    run["seed"] = cfg.seed;
    run["config"] = json::parse(cfg.to_json_text());
    run["converged"] = result.converged;
    run["message"] = result.message;
    run["iterations"] = result.iterations;
    run["final_loss"] = result.final_loss;
    run["bound_violations"] = result.bound_violations;
    json log = json::array();
    for (const auto& e : result.log)
        log.push_back({{"iter", e.iter}, {"loss", e.loss}, {"grad_norm", e.grad_norm}});
    run["log"] = log;
    write_file(dir / "run.json", run.dump(2) + "\n");

    for (size_t i = 0; i < result.nets.size(); ++i) {
        geom::GaugeBody body(result.nets[i], result.group);
        if (result.dim == 2) {
            write_file(dir / "shapes" / ("particle_" + std::to_string(i) + ".json"),
                       polyline_json(geom::boundary_polyline(body, 256)));
        } else {
            write_file(dir / "shapes" / ("particle_" + std::to_string(i) + ".obj"),
                       obj_text(geom::boundary_mesh(body, 512)));
        }
    }
    write_file(dir / "diagram.svg", render_svg(result.id, result.points));
}

void write_baseline(const std::filesystem::path& dir, diagram::DiagramId id, uint64_t seed,
                    int samples, const baseline::MonteCarloResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<diagram::DiagramResult::Row> rows(result.points.size());
    for (size_t i = 0; i < result.points.size(); ++i)
        rows[i] = {int(i), result.points[i].first, result.points[i].second, result.raws[i]};
    write_file(dir / "points.csv", points_csv(rows));
    json run;
    run["version"] = kRunVersion;
    run["diagram"] = diagram::diagram_name(id);
    run["seed"] = seed;
    run["samples"] = samples;
    run["skipped"] = result.skipped;
    run["kind"] = "baseline";
    write_file(dir / "run.json", run.dump(2) + "\n");
    write_file(dir / "diagram.svg", render_svg(id, {}, result.points));
}

LoadedRun load_run(const std::filesystem::path& dir) {
    LoadedRun lr;
    lr.run_json = read_file(dir / "run.json");
    json run;
    try {
        run = json::parse(lr.run_json);
    } catch (const json::exception& e) {
        throw std::runtime_error("run.json: parse error: " + std::string(e.what()));
    }
    if (!run.contains("version") || run["version"].get<std::string>() != kRunVersion)
        throw std::runtime_error(
            "run.json: version mismatch (file '" +
            (run.contains("version") ? run["version"].get<std::string>() : std::string("?")) +
            "', tool '" + kRunVersion + "')");
    auto idname = run["diagram"].get<std::string>();
    auto id = diagram::diagram_from_name(idname);
    if (!id) throw std::runtime_error("run.json: unknown diagram " + idname);
    lr.id = *id;
    if (run.contains("config")) lr.config = RunConfig::from_json_text(run["config"].dump());
    lr.points_csv = read_file(dir / "points.csv");
    lr.rows = parse_points_csv(lr.points_csv);
    if (std::filesystem::exists(dir / "shapes"))
        for (const auto& e : std::filesystem::directory_iterator(dir / "shapes"))
            lr.shapes.emplace_back(e.path().filename().string(), read_file(e.path()));
    std::sort(lr.shapes.begin(), lr.shapes.end());
    return lr;
}

} // namespace shapediag::io
