#ifndef SHAPEDIAG_QUAD_QUADRATURE_HPP
#define SHAPEDIAG_QUAD_QUADRATURE_HPP

#include <array>
#include <vector>

namespace shapediag::quad {

using Point = std::array<double, 3>; // z = 0 in 2D

// Node/weight sets on the reference unit ball B and sphere ∂B.
// Volume nodes: midpoint lattice, cells kept when the center is inside B,
// weight h^dim each; the half-cell offset keeps the origin off the grid.
// Boundary nodes: equispaced angles (2D) / Fibonacci spiral (3D), uniform
// weights summing exactly to |∂B|.
struct Quadrature {
    int dim = 2;
    std::vector<Point> volume_nodes;
    std::vector<double> volume_weights;
    std::vector<Point> boundary_nodes;
    std::vector<double> boundary_weights;

    static Quadrature make(int dim, double h, int boundary_count);

    // defaults sized for the acceptance tolerances on a CPU
    static Quadrature standard(int dim) {
        return dim == 2 ? make(2, 0.01, 512) : make(3, 0.05, 2048);
    }
};

// lattice over B: grid spacing h, offset h/2, cells with center strictly
// inside the unit ball
void ball_lattice(int dim, double h, std::vector<Point>& nodes, std::vector<double>& weights);

// M nodes on the unit sphere: 2D equispaced angles (weight 2*pi/M), 3D
// Fibonacci spiral (weight 4*pi/M)
void sphere_nodes(int dim, int count, std::vector<Point>& nodes, std::vector<double>& weights);

} // namespace shapediag::quad

#endif
