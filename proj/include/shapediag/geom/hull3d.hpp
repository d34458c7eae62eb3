#ifndef SHAPEDIAG_GEOM_HULL3D_HPP
#define SHAPEDIAG_GEOM_HULL3D_HPP

#include <array>
#include <vector>

namespace shapediag::geom {

// Triangulation of the convex hull of a 3D point set, outward-oriented.
// Intended for well-separated points on (or near) a sphere.
std::vector<std::array<int, 3>> convex_hull_3d(const std::vector<std::array<double, 3>>& pts);

} // namespace shapediag::geom

#endif
