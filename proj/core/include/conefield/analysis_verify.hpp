#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conefield/fundamental_radial.hpp"
#include "conefield/variational_solver.hpp"

namespace conefield {

struct CheckResult {
    std::string name;
    std::string theorem;  // short tag for the property being certified
    bool pass = false;
    bool applicable = true;
    double margin = 0.0;
    double tol = 0.0;
    std::string note;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    nlohmann::ordered_json meta;

    bool all_pass() const;
    nlohmann::ordered_json to_json() const;
};

struct ResidueResult {
    double mean = 0.0;
    double spread = 0.0;  // max - min across radii
    std::vector<double> radii;
    std::vector<double> per_radius;
    std::vector<int> skipped;
};

/// Mean ring flux of the relativistic gradient over the given radii. For a
/// solution enclosing total mass m the mean approximates -m.
ResidueResult residue(const ScalarField& u, const std::vector<double>& radii,
                      int samples = 512);

struct FarfieldFit {
    double coefficient = 0.0;
    double offset = 0.0;
    double residual = 0.0;  // rms of the fit
};

/// Least-squares fit u ~ -A log r + c over ring averages (N = 2 far field).
FarfieldFit farfield_fit_log(const std::function<double(double)>& ring_mean,
                             double r_lo, double r_hi, int rings = 8);
FarfieldFit farfield_fit_log(const ScalarField& u, double r_lo, double r_hi,
                             int rings = 8, int samples = 256);
/// Least-squares fit u ~ A r^{2-N} (+ c when with_offset, for profiles pinned
/// to zero at a finite boundary) over a radial profile (N >= 3 far field).
FarfieldFit farfield_fit_power(const RadialProfile& u, double r_lo, double r_hi,
                               int rings = 8, bool with_offset = false);

struct ConeHeights {
    std::vector<double> lambda;    // nodal value at each pole
    std::vector<double> tip_grad;  // max |grad| on cells at the pole node
    bool separation_ok = true;
    double worst_margin = 0.0;  // min over pairs of |p_i-p_j| - |l_i-l_j|
};

/// Requires every pole to be a mesh node.
ConeHeights cone_heights(const ScalarField& u, const PoleConfig& cfg);

/// Per-ladder-level max |grad| on the cells adjacent to one pole.
std::vector<double> lightcone_indicator(const SolveResult& result,
                                        std::size_t pole_index);

/// Scans pole-to-pole chords and sampled boundary-to-pole chords for
/// difference quotients at or above the threshold.
std::vector<LightSegment> lightlike_segment_scan(const ScalarField& u,
                                                 const PoleConfig& cfg,
                                                 double threshold = 0.98,
                                                 int boundary_samples = 64);

/// Lower bound by the per-pole radial solutions on their inscribed balls and
/// upper bound by the total-mass radial solution at the center. Positive
/// weights only; mixed-sign configs yield a skipped (inapplicable) entry.
/// When the field is a ladder level with mollifier index n, pass mollifier_n:
/// inside each bump the level-n envelope plateaus at the value reached at the
/// bump edge 2/n, which is what that level provably dominates.
std::vector<CheckResult> sandwich_check(const ScalarField& u,
                                        const PoleConfig& cfg, double R,
                                        double slack_rel = 0.02,
                                        int mollifier_n = 0);

struct RadialStaircase {
    std::vector<double> radii;   // increasing shell boundaries
    std::vector<double> values;  // non-increasing shell values
    double value_at(double r) const;
};

/// Symmetric decreasing rearrangement of a nodal field (by cell means onto
/// equal-measure shells) or of a point-evaluable function.
RadialStaircase decreasing_rearrangement(const ScalarField& u);
RadialStaircase decreasing_rearrangement(const DiscMesh& mesh,
                                         const std::function<double(Vec2)>& f);

struct RearrangementResult {
    CheckResult check;
    double max_violation = 0.0;  // max over shells of u*_f - u_{f*}
    RadialStaircase u_star;
    RadialProfile u_of_fstar{Dimension(2), {}, {}, 0.0, ProfileKind::Dirichlet};
};

/// Solves with the (nonnegative) source on the mesh, rearranges the solution,
/// and compares against the radial solution of the rearranged source.
RearrangementResult rearrangement_check(const DiscMesh& mesh,
                                        const SourceField& f,
                                        const SolverConfig& scfg,
                                        double slack_rel = 0.02);

struct GateResult {
    bool applicable = false;
    bool admissible = false;
    double lhs = 0.0;   // Phi_{N,a0}(0) + Phi_{N,b0}(0)
    double l0 = 0.0;    // cross-sign pole distance
    double margin = 0.0;
    bool sharper_certified = false;
    double sharper_lhs = 0.0;
    std::string note;
};

/// Mixed-mass admissibility: the summed central heights of the one-signed
/// radial majorants must stay below the cross-sign pole distance. Stated for
/// N >= 3; other configs report not-applicable.
GateResult mixed_mass_gate(const PoleConfig& cfg, double tol = 1e-10);

struct TruncationConfig {
    std::vector<Vec2> poles;
    std::vector<double> weights;
    double alpha_infinity = 0.0;  // closed-form series sum
    std::vector<int> levels;      // increasing pole counts
    double R = 4.0;
    double h = 0.0625;
    double refine_factor = 2.0;
    std::vector<double> flux_radii;
    SolverConfig solver;
    int source_n = 8;
};

struct TruncationLevel {
    int m = 0;
    double sup_delta = 0.0;
    double residue_mean = 0.0;
    double farfield_coeff = 0.0;
    bool converged = false;
};

struct TruncationReport {
    std::vector<TruncationLevel> levels;
    bool deltas_decreasing = false;
    double alpha_infinity = 0.0;
};

/// Solves with the first m poles for each level on one shared mesh and
/// reports sup-norm deltas plus the residue / far-field trend toward the
/// full series sum. Rejects weight sequences that are not summable against
/// the declared series sum.
TruncationReport infinite_cone_truncation(const TruncationConfig& cfg);

}  // namespace conefield
