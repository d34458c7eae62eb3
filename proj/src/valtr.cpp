#include "shapediag/baseline/valtr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapediag/pde/mfs.hpp"
#include "shapediag/util/parallel.hpp"
#include "shapediag/util/rng.hpp"

namespace shapediag::baseline {

bool ConvexPolygon::strictly_convex() const {
    const size_t n = vertices.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = vertices[i];
        const auto& b = vertices[(i + 1) % n];
        const auto& c = vertices[(i + 2) % n];
        double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if (!(cr > 0.0)) return false;
    }
    return true;
}

double ConvexPolygon::area() const {
    double s = 0.0;
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& a = vertices[i];
        const auto& b = vertices[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * s;
}

double ConvexPolygon::perimeter() const {
    double s = 0.0;
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& a = vertices[i];
        const auto& b = vertices[(i + 1) % n];
        s += std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    return s;
}

std::array<double, 2> ConvexPolygon::centroid() const {
    double a6 = 0.0, cx = 0.0, cy = 0.0;
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& p = vertices[i];
        const auto& q = vertices[(i + 1) % n];
        double cr = p[0] * q[1] - q[0] * p[1];
        a6 += cr;
        cx += (p[0] + q[0]) * cr;
        cy += (p[1] + q[1]) * cr;
    }
    return {cx / (3.0 * a6), cy / (3.0 * a6)};
}

double ConvexPolygon::inertia() const {
    // per-triangle second moments about the centroid
    auto c = centroid();
    double total = 0.0;
    const size_t n = vertices.size();
    for (size_t i = 0; i < n; ++i) {
        double ax = vertices[i][0] - c[0], ay = vertices[i][1] - c[1];
        double bx = vertices[(i + 1) % n][0] - c[0], by = vertices[(i + 1) % n][1] - c[1];
        double cr = ax * by - bx * ay;
        total += cr * (ax * ax + ay * ay + ax * bx + ay * by + bx * bx + by * by) / 12.0;
    }
    return total;
}

ConvexPolygon valtr_polygon(int n, uint64_t seed) {
    if (n < 3) throw std::invalid_argument("valtr_polygon: need n >= 3");
    Rng rng(seed);
    std::vector<double> xs(n), ys(n);
    for (auto& v : xs) v = rng.uniform();
    for (auto& v : ys) v = rng.uniform();
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());

    // split interior values into two chains of signed increments
    auto chains = [&](const std::vector<double>& v) {
        std::vector<double> inc;
        inc.reserve(n);
        double lo = v[0], hi = v[0];
        for (int k = 1; k < n - 1; ++k) {
            if (rng.uniform() < 0.5) {
                inc.push_back(v[k] - lo);
                lo = v[k];
            } else {
                inc.push_back(hi - v[k]);
                hi = v[k];
            }
        }
        inc.push_back(v[n - 1] - lo);
        inc.push_back(hi - v[n - 1]);
        return inc;
    };
    std::vector<double> vx = chains(xs), vy = chains(ys);
    // random pairing of the y-increments
    for (int k = n - 1; k > 0; --k)
        std::swap(vy[k], vy[rng.uniform_int(0, k)]);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> ang(n);
    for (int k = 0; k < n; ++k) ang[k] = std::atan2(vy[k], vx[k]);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return ang[a] < ang[b]; });

    ConvexPolygon poly;
    poly.vertices.resize(n);
    double x = 0.0, y = 0.0, xmin = 0.0, ymin = 0.0;
    for (int k = 0; k < n; ++k) {
        poly.vertices[k] = {x, y};
        x += vx[idx[k]];
        y += vy[idx[k]];
        xmin = std::min(xmin, poly.vertices[k][0]);
        ymin = std::min(ymin, poly.vertices[k][1]);
    }
    for (auto& v : poly.vertices) {
        v[0] -= xmin;
        v[1] -= ymin;
    }
    if (poly.area() < 0.0) std::reverse(poly.vertices.begin(), poly.vertices.end());
    return poly;
}

namespace {

// torsion of a polygon centered at its centroid, by MFS with edge collocation
double polygon_torsion(const ConvexPolygon& p) {
    auto c = p.centroid();
    const size_t n = p.vertices.size();
    std::vector<std::array<double, 3>> shifted(n);
    for (size_t i = 0; i < n; ++i)
        shifted[i] = {p.vertices[i][0] - c[0], p.vertices[i][1] - c[1], 0.0};

    // collocation along the edges (count per edge scaled by length); sources
    // at equal arclength steps around the whole boundary so short edges do
    // not cluster near-duplicate columns, dilated from the centroid
    double per = p.perimeter();
    const int total_col = 320, total_src = 80;
    const double delta = 0.5;
    std::vector<std::array<double, 3>> col, src;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = shifted[i];
        const auto& b = shifted[(i + 1) % n];
        double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        int nc = std::max(2, int(std::round(total_col * len / per)));
        for (int k = 0; k < nc; ++k) {
            double t = (k + 0.5) / nc;
            col.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), 0.0});
        }
    }
    {
        double step = per / total_src, walked = 0.0, next = step / 2.0;
        for (size_t i = 0; i < n; ++i) {
            const auto& a = shifted[i];
            const auto& b = shifted[(i + 1) % n];
            double len = std::hypot(b[0] - a[0], b[1] - a[1]);
            while (next < walked + len) {
                double t = (next - walked) / len;
                src.push_back({(1.0 + delta) * (a[0] + t * (b[0] - a[0])),
                               (1.0 + delta) * (a[1] + t * (b[1] - a[1])), 0.0});
                next += step;
            }
            walked += len;
        }
    }

    // interior quadrature: fan triangulation (origin, a, b), each triangle
    // split into k^2 congruent subtriangles, centroid rule
    std::vector<std::array<double, 3>> nodes;
    std::vector<double> weights;
    const int k = 24;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = shifted[i];
        const auto& b = shifted[(i + 1) % n];
        double tri_area = 0.5 * std::fabs(a[0] * b[1] - b[0] * a[1]);
        double w = tri_area / (k * k);
        auto emit = [&](double u, double v) {
            nodes.push_back({u * a[0] + v * b[0], u * a[1] + v * b[1], 0.0});
            weights.push_back(w);
        };
        for (int r = 0; r + 1 <= k; ++r)
            for (int c = 0; r + c + 1 <= k; ++c) {
                emit((r + 1.0 / 3.0) / k, (c + 1.0 / 3.0) / k); // upward
                if (r + c + 2 <= k) emit((r + 2.0 / 3.0) / k, (c + 2.0 / 3.0) / k); // downward
            }
    }
    return pde::torsion_from_points(2, src, col, nodes, weights);
}

} // namespace

PolygonFunctionals polygon_functionals(const ConvexPolygon& p, bool with_torsion) {
    if (!p.strictly_convex()) throw std::invalid_argument("polygon_functionals: not strictly convex");
    PolygonFunctionals f{p.area(), p.perimeter(), p.inertia(), std::nullopt};
    if (with_torsion) f.t = polygon_torsion(p);
    return f;
}

MonteCarloResult monte_carlo_diagram(diagram::DiagramId id, int samples, uint64_t seed, int n_min,
                                     int n_max) {
    using diagram::DiagramId;
    if (id != DiagramId::VPW2 && id != DiagramId::VPT2)
        throw std::invalid_argument("monte_carlo_diagram: polygon-computable diagrams are VPW2 and VPT2");
    MonteCarloResult out;
    out.points.resize(samples);
    out.raws.resize(samples);
    std::vector<int> skip(std::max(samples, 1), 0);
    parallel_for(samples, [&](int i) {
        Rng rng = Rng::substream(seed, uint64_t(i));
        int nv = int(rng.uniform_int(n_min, n_max));
        try {
            ConvexPolygon poly = valtr_polygon(nv, rng.next_u64());
            PolygonFunctionals f = polygon_functionals(poly, id == DiagramId::VPT2);
            diagram::FunctionalSet<double> set;
            set.vol = f.vol;
            set.per = f.per;
            if (id == DiagramId::VPW2) set.w = f.w;
            if (id == DiagramId::VPT2) set.t = f.t;
            double x, y;
            diagram::compose(id, set, x, y);
            out.points[i] = {x, y};
            out.raws[i] = set;
        } catch (const std::exception&) {
            skip[i] = 1;
            out.points[i] = {-1.0, -1.0};
        }
    });
    // drop failures, keep order
    MonteCarloResult packed;
    for (int i = 0; i < samples; ++i) {
        if (skip[i]) {
            ++packed.skipped;
            continue;
        }
        packed.points.push_back(out.points[i]);
        packed.raws.push_back(out.raws[i]);
    }
    return packed;
}

int occupied_cells(std::span<const std::pair<double, double>> pts, int grid) {
    std::vector<char> cell(size_t(grid) * grid, 0);
    int count = 0;
    for (const auto& [x, y] : pts) {
        if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) continue;
        int cx = std::min(grid - 1, int(x * grid));
        int cy = std::min(grid - 1, int(y * grid));
        if (!cell[size_t(cy) * grid + cx]) {
            cell[size_t(cy) * grid + cx] = 1;
            ++count;
        }
    }
    return count;
}

} // namespace shapediag::baseline
