#include "conefield/core_types.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace conefield {

Dimension::Dimension(int n) : n_(n) {
    if (n < 2) {
        throw std::invalid_argument("Dimension: N must be >= 2");
    }
    sphere_area_ = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double sphere_area(Dimension dim) { return dim.sphere_area(); }

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance: mismatched point dimensions");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

namespace {

double norm(const std::vector<double>& p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

}  // namespace

PoleConfig::PoleConfig(Dimension dim, std::vector<Pole> poles, double r0)
    : dim_(dim), poles_(std::move(poles)), r0_(r0) {
    if (r0_ <= 0.0) {
        throw std::invalid_argument("PoleConfig: R0 must be positive");
    }
    if (poles_.empty()) {
        throw std::invalid_argument("PoleConfig: at least one pole required");
    }
    for (const Pole& p : poles_) {
        if (static_cast<int>(p.point.size()) != dim_.value()) {
            throw std::invalid_argument("PoleConfig: point dimension mismatch");
        }
        if (p.weight == 0.0 || !std::isfinite(p.weight)) {
            throw std::invalid_argument("PoleConfig: weights must be nonzero finite");
        }
        if (norm(p.point) >= 0.5 * r0_) {
            throw std::invalid_argument("PoleConfig: poles must lie inside B_{R0/2}");
        }
        if (p.weight > 0.0) {
            positive_mass_ += p.weight;
        } else {
            negative_mass_ += -p.weight;
        }
    }
    if (poles_.size() >= 2) {
        GapInfo info;
        info.min_gap = std::numeric_limits<double>::infinity();
        double l0 = std::numeric_limits<double>::infinity();
        bool cross = false;
        for (std::size_t i = 0; i < poles_.size(); ++i) {
            for (std::size_t j = i + 1; j < poles_.size(); ++j) {
                const double d = distance(poles_[i].point, poles_[j].point);
                if (d <= 0.0) {
                    throw std::invalid_argument("PoleConfig: poles must be pairwise distinct");
                }
                info.min_gap = std::min(info.min_gap, d);
                if ((poles_[i].weight > 0.0) != (poles_[j].weight > 0.0)) {
                    cross = true;
                    l0 = std::min(l0, d);
                }
            }
        }
        if (cross) info.cross_sign_gap = l0;
        gaps_ = info;
    }
}

std::optional<GapInfo> min_pole_gap(const PoleConfig& cfg) { return cfg.gaps(); }

}  // namespace conefield
