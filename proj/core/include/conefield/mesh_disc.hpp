#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "conefield/core_types.hpp"

namespace conefield {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
};

/// Conforming triangulation of the disc B_R built from concentric node rings.
/// Ring radii are anchored at the refinement points' radii so that a node can
/// be placed exactly at each of them; rings in a refinement zone are spaced
/// and subdivided at h / refine_factor.
struct DiscMesh {
    double radius = 0.0;
    double target_h = 0.0;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> cells;  // counterclockwise
    std::vector<double> cell_areas;
    std::vector<std::array<Vec2, 3>> cell_grads;  // nodal hat gradients
    std::vector<int> boundary_nodes;
    std::vector<char> node_on_boundary;
    std::vector<std::vector<int>> node_cells;

    double total_area() const;
    /// Cell containing p, or -1 when p is outside the triangulated polygon.
    int locate(Vec2 p) const;
    std::array<double, 3> barycentric(int cell, Vec2 p) const;
    int nearest_node(Vec2 p) const;
    double cell_diameter(int cell) const;
    double min_edge_within(Vec2 center, double r) const;

    // uniform binning for point location
    int bins_per_side = 0;
    double bin_width = 0.0;
    std::vector<std::vector<int>> bin_cells;
};

DiscMesh build_mesh(double R, double h, const std::vector<Vec2>& refine_at = {},
                    double refine_factor = 1.0);

/// Nodal values on a DiscMesh with lazily cached per-cell gradients.
class ScalarField {
public:
    explicit ScalarField(const DiscMesh& mesh);
    ScalarField(const DiscMesh& mesh, std::vector<double> values);

    const DiscMesh& mesh() const { return *mesh_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    void set_values(std::vector<double> values);
    const std::vector<Vec2>& cell_gradients() const;

private:
    const DiscMesh* mesh_;
    std::vector<double> values_;
    mutable std::vector<Vec2> grads_;
    mutable bool grads_valid_ = false;
};

std::vector<Vec2> cell_gradient(const ScalarField& f);

/// Sum over cells of value * area.
double integrate_cellwise(const DiscMesh& mesh,
                          const std::vector<double>& cell_values);
/// Exact integral of the piecewise-linear interpolant of a nodal field.
double integrate(const ScalarField& f);

double interpolate(const ScalarField& f, Vec2 p);

struct RingFlux {
    double flux = 0.0;
    int skipped = 0;
};

/// Flux of grad u / sqrt(1 - |grad u|^2) through the circle |x| = r, sampled
/// at equally spaced angles with the trapezoid rule. Samples landing in
/// degenerate cells are skipped and counted.
RingFlux boundary_ring_flux(const ScalarField& f, double r, int samples = 512);

}  // namespace conefield
