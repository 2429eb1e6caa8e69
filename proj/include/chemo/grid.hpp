#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chemo {

/// Surface area of the unit sphere S^{n-1} in R^n.
inline double unit_sphere_area(int n) {
    const double pi = 3.14159265358979323846;
    return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the ball of radius R in R^n.
inline double ball_volume(int n, double R) {
    const double pi = 3.14159265358979323846;
    return std::pow(pi, 0.5 * n) * std::pow(R, n) / std::tgamma(0.5 * n + 1.0);
}

/**
 * Cell-centered discretization of the ball B_R in R^n reduced to the radial
 * interval [0, R]. Cell i spans [faces[i], faces[i+1]] with center nodes[i];
 * the first node is dr/2 > 0 so the radial operators never evaluate at r = 0.
 *
 * weights[i] is the exact volume of the spherical shell covered by cell i,
 * so the weights telescope: sum(weights) == |B_R| to machine precision on
 * every grid.
 */
struct RadialGrid {
    int dim = 2;                   // spatial dimension n >= 2
    double R = 1.0;                // ball radius
    int cells = 0;                 // M
    std::vector<double> nodes;     // cell centers, size M, strictly increasing
    std::vector<double> faces;     // face radii, size M+1, faces[0]=0, faces[M]=R
    std::vector<double> weights;   // shell volumes, size M

    double dr() const { return R / cells; }

    static RadialGrid make(int dim, double R, int cells) {
        if (dim < 2) throw std::invalid_argument("RadialGrid: dimension must be >= 2");
        if (!(R > 0.0)) throw std::invalid_argument("RadialGrid: radius must be positive");
        if (cells < 2) throw std::invalid_argument("RadialGrid: need at least 2 cells");
        RadialGrid g;
        g.dim = dim;
        g.R = R;
        g.cells = cells;
        const double h = R / cells;
        g.faces.resize(cells + 1);
        g.nodes.resize(cells);
        g.weights.resize(cells);
        const double area = unit_sphere_area(dim);
        for (int i = 0; i <= cells; ++i) g.faces[i] = (i == cells) ? R : i * h;
        for (int i = 0; i < cells; ++i) {
            g.nodes[i] = 0.5 * (g.faces[i] + g.faces[i + 1]);
            g.weights[i] = area * (std::pow(g.faces[i + 1], dim) - std::pow(g.faces[i], dim)) / dim;
        }
        return g;
    }

    double total_volume() const {
        double s = 0.0, c = 0.0;
        for (double w : weights) {
            double y = w - c;
            double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        return s;
    }
};

/**
 * Tensor-product (r, theta) grid on the disc B_R, n = 2 only. Used for
 * non-radial initial data; coefficients stay radial, so they are indexed by
 * the radial cell alone. Fields are stored row-major: index(i, j) with i the
 * radial cell and j the angular cell, theta periodic.
 */
struct PolarGrid {
    double R = 1.0;
    int cells_r = 0;
    int cells_theta = 0;
    std::vector<double> nodes_r;   // radial centers, size cells_r
    std::vector<double> faces_r;   // radial faces, size cells_r+1
    std::vector<double> theta;     // angular centers, size cells_theta
    std::vector<double> weights;   // cell areas, size cells_r*cells_theta

    double dr() const { return R / cells_r; }
    double dtheta() const { return 2.0 * 3.14159265358979323846 / cells_theta; }
    std::size_t size() const { return static_cast<std::size_t>(cells_r) * cells_theta; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * cells_theta + j; }

    static PolarGrid make(double R, int cells_r, int cells_theta) {
        if (!(R > 0.0)) throw std::invalid_argument("PolarGrid: radius must be positive");
        if (cells_r < 2) throw std::invalid_argument("PolarGrid: need at least 2 radial cells");
        if (cells_theta < 8) throw std::invalid_argument("PolarGrid: need at least 8 angular cells");
        PolarGrid g;
        g.R = R;
        g.cells_r = cells_r;
        g.cells_theta = cells_theta;
        const double h = R / cells_r;
        const double dth = 2.0 * 3.14159265358979323846 / cells_theta;
        g.faces_r.resize(cells_r + 1);
        g.nodes_r.resize(cells_r);
        for (int i = 0; i <= cells_r; ++i) g.faces_r[i] = (i == cells_r) ? R : i * h;
        for (int i = 0; i < cells_r; ++i) g.nodes_r[i] = 0.5 * (g.faces_r[i] + g.faces_r[i + 1]);
        g.theta.resize(cells_theta);
        for (int j = 0; j < cells_theta; ++j) g.theta[j] = (j + 0.5) * dth;
        g.weights.resize(g.size());
        for (int i = 0; i < cells_r; ++i) {
            const double shell = 0.5 * (g.faces_r[i + 1] * g.faces_r[i + 1] - g.faces_r[i] * g.faces_r[i]);
            for (int j = 0; j < cells_theta; ++j) g.weights[g.index(i, j)] = shell * dth;
        }
        return g;
    }

    double total_volume() const {
        double s = 0.0, c = 0.0;
        for (double w : weights) {
            double y = w - c;
            double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        return s;
    }
};

}  // namespace chemo
