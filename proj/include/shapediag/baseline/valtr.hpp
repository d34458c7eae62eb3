#ifndef SHAPEDIAG_BASELINE_VALTR_HPP
#define SHAPEDIAG_BASELINE_VALTR_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "shapediag/diagram/catalogue.hpp"

namespace shapediag::baseline {

// Counter-clockwise convex polygon inside the unit square.
struct ConvexPolygon {
    std::vector<std::array<double, 2>> vertices;

    bool strictly_convex() const;
    double area() const;      // shoelace
    double perimeter() const;
    std::array<double, 2> centroid() const;
    // second central moment int |x - centroid|^2 over the polygon
    double inertia() const;
};

// Valtr construction: exact-uniform over point sets in convex position in
// the unit square (random coordinate splits -> signed increments -> sort by
// angle -> prefix sums).
ConvexPolygon valtr_polygon(int n, uint64_t seed);

struct PolygonFunctionals {
    double vol, per, w;
    std::optional<double> t; // filled when requested (MFS solve)
};

// Exact geometric functionals; torsion via MFS with collocation along the
// edges (polygon shifted so the centroid is the origin).
PolygonFunctionals polygon_functionals(const ConvexPolygon& p, bool with_torsion = false);

struct MonteCarloResult {
    std::vector<std::pair<double, double>> points;
    std::vector<diagram::FunctionalSet<double>> raws;
    int skipped = 0; // per-sample failures
};

// Random-polygon point cloud for VPW2 or VPT2; vertex counts uniform in
// [n_min, n_max].
MonteCarloResult monte_carlo_diagram(diagram::DiagramId id, int samples, uint64_t seed,
                                     int n_min = 3, int n_max = 30);

// fraction-of-occupied-cells coverage on a grid over [0,1]^2
int occupied_cells(std::span<const std::pair<double, double>> pts, int grid = 50);

} // namespace shapediag::baseline

#endif
