#include "conefield/fundamental_radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conefield/quadrature.hpp"
#include "conefield/source_mollifier.hpp"

namespace conefield {

double RadialProfile::value_at(double r) const {
    if (grid.empty()) throw std::logic_error("RadialProfile: empty grid");
    if (r <= grid.front()) return values.front();
    if (r >= grid.back()) return values.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - grid.begin());
    const double r0 = grid[k - 1], r1 = grid[k];
    const double t = (r - r0) / (r1 - r0);
    return (1.0 - t) * values[k - 1] + t * values[k];
}

double phi_2d(double alpha, double r) {
    if (alpha <= 0.0) throw std::domain_error("phi_2d: alpha must be positive");
    if (r < 0.0) throw std::domain_error("phi_2d: r must be >= 0");
    const double c = alpha / (2.0 * M_PI);
    // -c * log((r + sqrt(c^2 + r^2)) / c), written with log1p for small r.
    return -c * std::log1p((r + std::hypot(c, r) - c) / c);
}

double phi_grad_mag(Dimension dim, double alpha, double r) {
    if (alpha <= 0.0) throw std::domain_error("phi_grad_mag: alpha must be positive");
    if (r < 0.0) throw std::domain_error("phi_grad_mag: r must be >= 0");
    const double c = dim.c_n() * alpha;
    const double n1 = dim.value() - 1;
    return c / std::sqrt(std::pow(r, 2.0 * n1) + c * c);
}

namespace {

// Tail int_r^inf c (s^{2(N-1)} + c^2)^{-1/2} ds expanded to second order;
// valid once c^2 / r^{2(N-1)} is small.
double phi_tail(int n, double c, double r) {
    const double lead = c * std::pow(r, 2.0 - n) / (n - 2);
    const double corr =
        0.5 * c * c * c * std::pow(r, 4.0 - 3.0 * n) / (3 * n - 4);
    return lead - corr;
}

double phi_split_radius(int n, double c) {
    return std::max(10.0, 10.0 * std::pow(c, 1.0 / (n - 1)));
}

}  // namespace

double phi_nd(Dimension dim, double alpha, double r, double tol) {
    const int n = dim.value();
    if (n < 3) throw std::domain_error("phi_nd: requires N >= 3");
    if (alpha <= 0.0) throw std::domain_error("phi_nd: alpha must be positive");
    if (!(tol > 0.0)) throw std::domain_error("phi_nd: tol must be positive");
    if (r < 0.0) throw std::domain_error("phi_nd: r must be >= 0");

    const double c = dim.c_n() * alpha;
    const double rs = phi_split_radius(n, c);
    if (r >= rs) return phi_tail(n, c, r);
    const double exponent = 2.0 * (n - 1);
    const auto integrand = [c, exponent](double s) {
        return c / std::sqrt(std::pow(s, exponent) + c * c);
    };
    return integrate(integrand, r, rs, 0.5 * tol) + phi_tail(n, c, rs);
}

double phi_value(Dimension dim, double alpha, double r, double tol) {
    return dim.value() == 2 ? phi_2d(alpha, r) : phi_nd(dim, alpha, r, tol);
}

double phi_shifted(Dimension dim, double alpha, double bar_alpha, double r,
                   double tol) {
    if (dim.value() < 3) throw std::domain_error("phi_shifted: requires N >= 3");
    if (bar_alpha <= 0.0 || alpha < bar_alpha) {
        throw std::domain_error("phi_shifted: requires alpha >= bar_alpha > 0");
    }
    return phi_nd(dim, alpha, r, tol) + phi_nd(dim, bar_alpha, 0.0, tol) -
           phi_nd(dim, alpha, 0.0, tol);
}

RadialSource::RadialSource(Dimension dim, std::function<double(double)> g,
                           double support_radius)
    : dim_(dim), g_(std::move(g)), support_(support_radius) {
    if (!(support_ >= 0.0)) {
        throw std::invalid_argument("RadialSource: support radius must be >= 0");
    }
    const int table = 2048;
    grid_.resize(table + 1);
    h_.resize(table + 1);
    grid_[0] = 0.0;
    h_[0] = 0.0;
    if (support_ == 0.0) return;
    const double nm1 = dim_.value() - 1;
    const auto moment_integrand = [this, nm1](double t) {
        return g_(t) * std::pow(t, nm1);
    };
    for (int k = 1; k <= table; ++k) {
        grid_[k] = support_ * k / table;
        const double seg =
            integrate(moment_integrand, grid_[k - 1], grid_[k], 1e-14, 1e-12);
        if (seg < -1e-14) {
            throw std::domain_error("RadialSource: source must be nonnegative");
        }
        h_[k] = h_[k - 1] + std::max(seg, 0.0);
    }
}

RadialSource RadialSource::zero(Dimension dim) {
    return RadialSource(dim, [](double) { return 0.0; }, 0.0);
}

RadialSource RadialSource::mollified_pole(Dimension dim, double alpha, int n) {
    if (alpha <= 0.0) {
        throw std::domain_error("RadialSource: alpha must be positive");
    }
    Mollifier eta(dim, n);
    return RadialSource(
        dim, [eta, alpha](double r) { return alpha * eta.radial(r); },
        eta.support_radius());
}

RadialSource RadialSource::staircase(Dimension dim, std::vector<double> radii,
                                     std::vector<double> values) {
    if (radii.size() != values.size() || radii.empty()) {
        throw std::invalid_argument("RadialSource: staircase size mismatch");
    }
    for (double v : values) {
        if (v < 0.0) throw std::domain_error("RadialSource: negative staircase value");
    }
    auto r = radii;
    auto v = values;
    auto eval = [r, v](double x) {
        const auto it = std::lower_bound(r.begin(), r.end(), x);
        if (it == r.end()) return 0.0;
        return v[static_cast<std::size_t>(it - r.begin())];
    };
    return RadialSource(dim, eval, radii.back());
}

double RadialSource::g(double r) const {
    if (r >= support_) return 0.0;
    return g_(r);
}

double RadialSource::moment(double r) const {
    if (h_.empty() || support_ == 0.0) return 0.0;
    if (r >= support_) return h_.back();
    if (r <= 0.0) return 0.0;
    const double pos = r / support_ * (grid_.size() - 1);
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(pos), grid_.size() - 2);
    const double t = pos - static_cast<double>(k);
    return (1.0 - t) * h_[k] + t * h_[k + 1];
}

std::vector<double> make_radial_grid(double R, int nodes) {
    if (!(R > 0.0) || nodes < 16) {
        throw std::invalid_argument("make_radial_grid: bad arguments");
    }
    std::vector<double> grid;
    grid.reserve(nodes + 1);
    grid.push_back(0.0);
    const int geo = nodes / 3;
    const int uni = nodes - geo;
    const double inner = 0.1 * R;
    const double r_min = 1e-5 * R;
    // geometric fill of (0, inner], then uniform (inner, R]
    const double ratio = std::pow(inner / r_min, 1.0 / (geo - 1));
    double r = r_min;
    for (int k = 0; k < geo; ++k) {
        grid.push_back(r);
        r *= ratio;
    }
    grid[geo] = inner;
    for (int k = 1; k <= uni; ++k) {
        grid.push_back(inner + (R - inner) * k / uni);
    }
    grid.back() = R;
    return grid;
}

RadialProfile radial_dirichlet(Dimension dim, const RadialSource& source,
                               double R, const std::vector<double>& grid,
                               double tol) {
    if (grid.size() < 2 || grid.front() != 0.0 ||
        std::abs(grid.back() - R) > 1e-12 * std::max(1.0, R)) {
        throw std::invalid_argument("radial_dirichlet: grid must span [0, R]");
    }
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw std::invalid_argument("radial_dirichlet: grid must be increasing");
    }
    if (R <= source.support_radius()) {
        throw std::invalid_argument("radial_dirichlet: R must exceed the source support");
    }

    const double expo = 2.0 * (dim.value() - 1);
    const auto slope = [&source, expo](double s) {
        if (s <= 0.0) return 0.0;
        const double h = source.moment(s);
        if (h == 0.0) return 0.0;
        return h / std::sqrt(std::pow(s, expo) + h * h);
    };

    RadialProfile out{dim, grid, std::vector<double>(grid.size(), 0.0),
                      source.total_moment() / dim.c_n(), ProfileKind::Dirichlet};
    const double seg_tol = tol / static_cast<double>(grid.size());
    for (std::size_t k = grid.size() - 1; k-- > 0;) {
        const double seg = integrate(slope, grid[k], grid[k + 1], seg_tol);
        out.values[k] = out.values[k + 1] + seg;
    }
    return out;
}

}  // namespace conefield
