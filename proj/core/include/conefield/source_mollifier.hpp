#pragma once

#include <vector>

#include "conefield/core_types.hpp"

namespace conefield {

/// C^2 bump profile: 1 on [0,1], quintic-smoothstep descent on (1,2), 0 beyond.
double eta0(double s);

/// int_0^2 eta0(s) s^{N-1} ds, computed by quadrature and cached per N.
double eta0_norm_integral(Dimension dim);

/// Unit-mass mollifier at scale 2/n: eta_n(x) = C_{N,n} eta0(n |x|) with
/// int_{R^N} eta_n = 1.
class Mollifier {
public:
    Mollifier(Dimension dim, int n);

    double radial(double r) const;
    double operator()(const std::vector<double>& x) const;
    double support_radius() const { return 2.0 / n_; }
    int n() const { return n_; }
    double normalization() const { return norm_; }
    const Dimension& dim() const { return dim_; }

private:
    Dimension dim_;
    int n_;
    double norm_;
};

double eta_n(int n, Dimension dim, const std::vector<double>& x);

/// Assembled multi-pole source g_n(x) = sum_j w_j eta_n(x - p_j).
class SourceField {
public:
    SourceField(PoleConfig cfg, int n);

    double operator()(const std::vector<double>& x) const;
    double value2d(double x, double y) const;
    double total_mass() const;
    /// True when 2/n is not below half the minimum pole gap, i.e. bumps may
    /// touch. A warning condition, not an error.
    bool bumps_overlap() const { return overlap_; }
    const PoleConfig& config() const { return cfg_; }
    const Mollifier& mollifier() const { return eta_; }
    int n() const { return eta_.n(); }

private:
    PoleConfig cfg_;
    Mollifier eta_;
    bool overlap_ = false;
};

SourceField assemble_source(const PoleConfig& cfg, int n);

}  // namespace conefield
