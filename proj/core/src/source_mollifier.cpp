#include "conefield/source_mollifier.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "conefield/quadrature.hpp"

namespace conefield {

double eta0(double s) {
    if (s < 0.0) throw std::domain_error("eta0: s must be >= 0");
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double t = s - 1.0;
    const double smooth = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    return 1.0 - smooth;
}

double eta0_norm_integral(Dimension dim) {
    static std::map<int, double> cache;
    const int n = dim.value();
    const auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const double nm1 = n - 1;
    const double value = integrate(
        [nm1](double s) { return eta0(s) * std::pow(s, nm1); }, 0.0, 2.0,
        1e-14, 1e-14);
    cache[n] = value;
    return value;
}

Mollifier::Mollifier(Dimension dim, int n) : dim_(dim), n_(n) {
    if (n < 1) throw std::domain_error("Mollifier: n must be >= 1");
    norm_ = dim_.c_n() * std::pow(static_cast<double>(n), dim_.value()) /
            eta0_norm_integral(dim_);
}

double Mollifier::radial(double r) const {
    if (r >= support_radius()) return 0.0;
    return norm_ * eta0(n_ * r);
}

double Mollifier::operator()(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_.value()) {
        throw std::invalid_argument("Mollifier: point dimension mismatch");
    }
    double s = 0.0;
    for (double v : x) s += v * v;
    return radial(std::sqrt(s));
}

double eta_n(int n, Dimension dim, const std::vector<double>& x) {
    return Mollifier(dim, n)(x);
}

SourceField::SourceField(PoleConfig cfg, int n)
    : cfg_(std::move(cfg)), eta_(cfg_.dim(), n) {
    const auto gaps = cfg_.gaps();
    if (gaps && eta_.support_radius() >= 0.5 * gaps->min_gap) {
        overlap_ = true;
    }
}

double SourceField::operator()(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cfg_.dim().value()) {
        throw std::invalid_argument("SourceField: point dimension mismatch");
    }
    double total = 0.0;
    const double support = eta_.support_radius();
    for (const Pole& p : cfg_.poles()) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - p.point[i];
            s += d * d;
        }
        const double r = std::sqrt(s);
        if (r < support) total += p.weight * eta_.radial(r);
    }
    return total;
}

double SourceField::value2d(double x, double y) const {
    if (cfg_.dim().value() != 2) {
        throw std::logic_error("SourceField::value2d: config is not 2D");
    }
    double total = 0.0;
    const double support = eta_.support_radius();
    for (const Pole& p : cfg_.poles()) {
        const double r = std::hypot(x - p.point[0], y - p.point[1]);
        if (r < support) total += p.weight * eta_.radial(r);
    }
    return total;
}

double SourceField::total_mass() const {
    double m = 0.0;
    for (const Pole& p : cfg_.poles()) m += p.weight;
    return m;
}

SourceField assemble_source(const PoleConfig& cfg, int n) {
    return SourceField(cfg, n);
}

}  // namespace conefield
