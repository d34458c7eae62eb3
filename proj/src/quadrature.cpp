#include "shapediag/quad/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace shapediag::quad {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void ball_lattice(int dim, double h, std::vector<Point>& nodes, std::vector<double>& weights) {
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("ball_lattice: need 0 < h < 1");
    nodes.clear();
    weights.clear();
    int n = int(std::ceil(1.0 / h)) + 1;
    double w = std::pow(h, dim);
    if (dim == 2) {
        for (int i = -n; i < n; ++i) {
            double x = (i + 0.5) * h;
            for (int j = -n; j < n; ++j) {
                double y = (j + 0.5) * h;
                if (x * x + y * y < 1.0) {
                    nodes.push_back({x, y, 0.0});
                    weights.push_back(w);
                }
            }
        }
    } else if (dim == 3) {
        for (int i = -n; i < n; ++i) {
            double x = (i + 0.5) * h;
            for (int j = -n; j < n; ++j) {
                double y = (j + 0.5) * h;
                for (int k = -n; k < n; ++k) {
                    double z = (k + 0.5) * h;
                    if (x * x + y * y + z * z < 1.0) {
                        nodes.push_back({x, y, z});
                        weights.push_back(w);
                    }
                }
            }
        }
    } else {
        throw std::invalid_argument("ball_lattice: dim must be 2 or 3");
    }
}

void sphere_nodes(int dim, int count, std::vector<Point>& nodes, std::vector<double>& weights) {
    if (count < 8) throw std::invalid_argument("sphere_nodes: need M >= 8");
    nodes.clear();
    weights.clear();
    if (dim == 2) {
        double w = 2.0 * kPi / count;
        for (int k = 0; k < count; ++k) {
            double a = 2.0 * kPi * k / count;
            nodes.push_back({std::cos(a), std::sin(a), 0.0});
            weights.push_back(w);
        }
    } else if (dim == 3) {
        // golden-angle spiral; z offset by half a band keeps poles off-node
        double w = 4.0 * kPi / count;
        double golden = kPi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            double z = 1.0 - (2.0 * k + 1.0) / count;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double a = golden * k;
            nodes.push_back({r * std::cos(a), r * std::sin(a), z});
            weights.push_back(w);
        }
    } else {
        throw std::invalid_argument("sphere_nodes: dim must be 2 or 3");
    }
}

Quadrature Quadrature::make(int dim, double h, int boundary_count) {
    Quadrature q;
    q.dim = dim;
    ball_lattice(dim, h, q.volume_nodes, q.volume_weights);
    sphere_nodes(dim, boundary_count, q.boundary_nodes, q.boundary_weights);
    return q;
}

} // namespace shapediag::quad
