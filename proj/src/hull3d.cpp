#include "shapediag/geom/hull3d.hpp"

#include <cmath>
#include <stdexcept>

#include "shapediag/geom/gauge.hpp"
#include "shapediag/quad/quadrature.hpp"

namespace shapediag::geom {

namespace {

using V3 = std::array<double, 3>;

V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
V3 cross(const V3& a, const V3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dotv(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

struct Face {
    int a, b, c;
    V3 n;      // outward normal (not normalized)
    double d;  // plane offset: n . x = d
    bool alive = true;
};

Face make_face(const std::vector<V3>& p, int a, int b, int c, const V3& interior) {
    Face f{a, b, c, {}, 0.0, true};
    f.n = cross(sub(p[b], p[a]), sub(p[c], p[a]));
    f.d = dotv(f.n, p[a]);
    if (dotv(f.n, interior) > f.d) { // flip to face outward
        std::swap(f.b, f.c);
        f.n = {-f.n[0], -f.n[1], -f.n[2]};
        f.d = -f.d;
    }
    return f;
}

} // namespace

// Incremental hull: start from a tetrahedron, insert points, replace visible
// faces by a cone over their horizon.
std::vector<std::array<int, 3>> convex_hull_3d(const std::vector<V3>& pts) {
    const size_t n = pts.size();
    if (n < 4) throw std::invalid_argument("convex_hull_3d: need at least 4 points");

    // initial non-degenerate tetrahedron
    size_t i1 = 1;
    while (i1 < n && std::fabs(pts[i1][0] - pts[0][0]) + std::fabs(pts[i1][1] - pts[0][1]) +
                             std::fabs(pts[i1][2] - pts[0][2]) <
                         1e-12)
        ++i1;
    size_t i2 = i1 + 1;
    auto area2 = [&](size_t k) {
        V3 c = cross(sub(pts[i1], pts[0]), sub(pts[k], pts[0]));
        return dotv(c, c);
    };
    while (i2 < n && area2(i2) < 1e-20) ++i2;
    size_t i3 = i2 + 1;
    auto vol = [&](size_t k) {
        V3 c = cross(sub(pts[i1], pts[0]), sub(pts[i2], pts[0]));
        return dotv(c, sub(pts[k], pts[0]));
    };
    while (i3 < n && std::fabs(vol(i3)) < 1e-18) ++i3;
    if (i1 >= n || i2 >= n || i3 >= n)
        throw std::runtime_error("convex_hull_3d: degenerate input");

    V3 interior{};
    for (size_t k : {size_t(0), i1, i2, i3})
        for (int d = 0; d < 3; ++d) interior[d] += pts[k][d] / 4.0;

    std::vector<Face> faces;
    faces.push_back(make_face(pts, 0, int(i1), int(i2), interior));
    faces.push_back(make_face(pts, 0, int(i1), int(i3), interior));
    faces.push_back(make_face(pts, 0, int(i2), int(i3), interior));
    faces.push_back(make_face(pts, int(i1), int(i2), int(i3), interior));

    for (size_t p = 0; p < n; ++p) {
        if (p == 0 || p == i1 || p == i2 || p == i3) continue;
        // faces visible from pts[p]
        std::vector<int> visible;
        for (size_t f = 0; f < faces.size(); ++f) {
            if (!faces[f].alive) continue;
            double side = dotv(faces[f].n, pts[p]) - faces[f].d;
            if (side > 1e-12 * std::sqrt(dotv(faces[f].n, faces[f].n))) visible.push_back(int(f));
        }
        if (visible.empty()) continue;
        // horizon = edges shared by exactly one visible face
        std::vector<std::pair<int, int>> horizon;
        auto add_edge = [&](int a, int b) {
            for (auto it = horizon.begin(); it != horizon.end(); ++it) {
                if (it->first == b && it->second == a) {
                    horizon.erase(it);
                    return;
                }
            }
            horizon.emplace_back(a, b);
        };
        for (int f : visible) {
            add_edge(faces[f].a, faces[f].b);
            add_edge(faces[f].b, faces[f].c);
            add_edge(faces[f].c, faces[f].a);
            faces[f].alive = false;
        }
        for (auto [a, b] : horizon) faces.push_back(make_face(pts, a, b, int(p), interior));
    }

    std::vector<std::array<int, 3>> tris;
    for (const Face& f : faces)
        if (f.alive) tris.push_back({f.a, f.b, f.c});
    return tris;
}

TriMesh boundary_mesh(const GaugeBody& body, int count) {
    if (body.net.dim != 3) throw std::invalid_argument("boundary_mesh: 3D bodies only");
    std::vector<std::array<double, 3>> dirs;
    {
        std::vector<quad::Point> nd;
        std::vector<double> w;
        quad::sphere_nodes(3, count, nd, w);
        dirs.reserve(nd.size());
        for (const auto& p : nd) dirs.push_back({p[0], p[1], p[2]});
    }
    TriMesh mesh;
    mesh.triangles = convex_hull_3d(dirs);
    LiftedGauge<double> lg = lift_params(body);
    GaugeEval<double> ev(lg);
    SphereJet<double> jet;
    mesh.vertices.reserve(dirs.size());
    for (const auto& d : dirs) {
        double nhat[3] = {d[0], d[1], d[2]};
        ev.sphere_jet(nhat, 0, jet);
        if (!(jet.q > 0)) throw GaugeNotPositive();
        mesh.vertices.push_back({d[0] / jet.q, d[1] / jet.q, d[2] / jet.q});
    }
    return mesh;
}

} // namespace shapediag::geom
