#pragma once

#include <optional>
#include <vector>

namespace conefield {

/// Ambient dimension N >= 2. Carries the unit-sphere area
/// |dB_1| = 2 pi^{N/2} / Gamma(N/2) and its reciprocal c_N, the constants
/// every radial formula is built from.
class Dimension {
public:
    explicit Dimension(int n);

    int value() const { return n_; }
    double sphere_area() const { return sphere_area_; }
    double c_n() const { return 1.0 / sphere_area_; }

    friend bool operator==(const Dimension& a, const Dimension& b) {
        return a.n_ == b.n_;
    }

private:
    int n_;
    double sphere_area_;
};

double sphere_area(Dimension dim);

struct Pole {
    std::vector<double> point;
    double weight = 0.0;
};

struct GapInfo {
    double min_gap = 0.0;
    /// Distance between the positive-weight and negative-weight pole sets;
    /// empty when only one sign is present.
    std::optional<double> cross_sign_gap;
};

/// Signed point masses inside B_{R0/2}. Immutable after construction.
class PoleConfig {
public:
    PoleConfig(Dimension dim, std::vector<Pole> poles, double r0);

    const Dimension& dim() const { return dim_; }
    const std::vector<Pole>& poles() const { return poles_; }
    double r0() const { return r0_; }
    std::size_t size() const { return poles_.size(); }

    /// alpha_0: sum of the positive weights.
    double positive_mass() const { return positive_mass_; }
    /// beta_0: magnitude of the sum of the negative weights.
    double negative_mass() const { return negative_mass_; }
    double net_mass() const { return positive_mass_ - negative_mass_; }
    bool mixed_signs() const {
        return positive_mass_ > 0.0 && negative_mass_ > 0.0;
    }
    const std::optional<GapInfo>& gaps() const { return gaps_; }

private:
    Dimension dim_;
    std::vector<Pole> poles_;
    double r0_;
    double positive_mass_ = 0.0;
    double negative_mass_ = 0.0;
    std::optional<GapInfo> gaps_;
};

/// Pairwise minimum distance plus the cross-sign distance l0 when both signs
/// are present. Empty when the configuration has fewer than two poles.
std::optional<GapInfo> min_pole_gap(const PoleConfig& cfg);

/// Chord along which the difference quotient of a field is close to 1.
struct LightSegment {
    std::vector<double> a;
    std::vector<double> b;
    double slope = 0.0;
};

double distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace conefield
