#pragma once

#include <functional>
#include <vector>

#include "conefield/core_types.hpp"

namespace conefield {

enum class ProfileKind { Fundamental, Dirichlet, Shifted };

/// Radially symmetric field sampled on a strictly increasing grid.
struct RadialProfile {
    Dimension dim;
    std::vector<double> grid;    // r_0 = 0 < ... < r_M = R
    std::vector<double> values;
    double alpha = 0.0;
    ProfileKind kind = ProfileKind::Dirichlet;

    double value_at(double r) const;  // linear interpolation, clamped at the ends
    double radius() const { return grid.back(); }
};

/// Decaying radial solution with a single point mass alpha > 0 at the origin,
/// normalized to vanish at the pole (N = 2): value 0 at r = 0, -> -inf as r -> inf.
double phi_2d(double alpha, double r);

/// Same for N >= 3: positive, decaying to 0 at infinity. Absolute error <= tol.
double phi_nd(Dimension dim, double alpha, double r, double tol = 1e-10);

/// |grad| of the single-mass radial solution: c_N a / sqrt(r^{2(N-1)} + c_N^2 a^2).
double phi_grad_mag(Dimension dim, double alpha, double r);

/// Shifted family (N >= 3, alpha >= bar_alpha): same profile as the alpha
/// solution but re-pinned so its value at the origin matches the bar_alpha one.
double phi_shifted(Dimension dim, double alpha, double bar_alpha, double r,
                   double tol = 1e-10);

/// Dispatch on N: closed form for N = 2, quadrature for N >= 3.
double phi_value(Dimension dim, double alpha, double r, double tol = 1e-10);

/// Nonnegative radial source together with its cumulative moment
/// h(r) = int_0^r g(t) t^{N-1} dt, cached densely over the support and
/// constant beyond it.
class RadialSource {
public:
    RadialSource(Dimension dim, std::function<double(double)> g,
                 double support_radius);

    static RadialSource zero(Dimension dim);
    static RadialSource mollified_pole(Dimension dim, double alpha, int n);
    /// Piecewise-constant source: values[k] on (radii[k-1], radii[k]] with
    /// radii[-1] = 0. Values must be nonnegative.
    static RadialSource staircase(Dimension dim, std::vector<double> radii,
                                  std::vector<double> values);

    const Dimension& dim() const { return dim_; }
    double g(double r) const;
    double moment(double r) const;
    double total_moment() const { return h_.empty() ? 0.0 : h_.back(); }
    double support_radius() const { return support_; }

private:
    Dimension dim_;
    std::function<double(double)> g_;
    double support_;
    std::vector<double> grid_;
    std::vector<double> h_;
};

/// Grid clustered geometrically near 0, uniform beyond; last node exactly R.
std::vector<double> make_radial_grid(double R, int nodes = 2048);

/// Radial solution of the zero-boundary problem on B_R driven by the source:
/// v(r) = int_r^R h(s) / sqrt(s^{2(N-1)} + h(s)^2) ds on the given grid.
RadialProfile radial_dirichlet(Dimension dim, const RadialSource& source,
                               double R, const std::vector<double>& grid,
                               double tol = 1e-9);

}  // namespace conefield
