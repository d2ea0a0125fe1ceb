#include "conefield/analysis_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace conefield {

namespace {

Vec2 pole_xy(const Pole& p) { return {p.point[0], p.point[1]}; }

}  // namespace

bool VerifyReport::all_pass() const {
    for (const CheckResult& c : checks) {
        if (c.applicable && !c.pass) return false;
    }
    return true;
}

nlohmann::ordered_json VerifyReport::to_json() const {
    nlohmann::ordered_json out;
    out["checks"] = nlohmann::ordered_json::array();
    for (const CheckResult& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["theorem"] = c.theorem;
        e["pass"] = c.pass;
        e["margin"] = c.margin;
        e["tol"] = c.tol;
        if (!c.applicable) e["applicable"] = false;
        if (!c.note.empty()) e["note"] = c.note;
        out["checks"].push_back(e);
    }
    out["meta"] = meta.is_null() ? nlohmann::ordered_json::object() : meta;
    return out;
}

ResidueResult residue(const ScalarField& u, const std::vector<double>& radii,
                      int samples) {
    if (radii.empty()) throw std::invalid_argument("residue: no radii");
    ResidueResult out;
    out.radii = radii;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for (double r : radii) {
        const RingFlux f = boundary_ring_flux(u, r, samples);
        out.per_radius.push_back(f.flux);
        out.skipped.push_back(f.skipped);
        sum += f.flux;
        lo = std::min(lo, f.flux);
        hi = std::max(hi, f.flux);
    }
    out.mean = sum / static_cast<double>(radii.size());
    out.spread = hi - lo;
    return out;
}

FarfieldFit farfield_fit_log(const std::function<double(double)>& ring_mean,
                             double r_lo, double r_hi, int rings) {
    if (rings < 4) throw std::invalid_argument("farfield_fit: need >= 4 rings");
    if (!(r_lo > 0.0) || !(r_hi > r_lo)) {
        throw std::invalid_argument("farfield_fit: bad annulus");
    }
    // least squares for u = -A log r + c
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs(rings), ys(rings);
    for (int k = 0; k < rings; ++k) {
        const double r = r_lo + (r_hi - r_lo) * k / (rings - 1);
        const double x = std::log(r);
        const double y = ring_mean(r);
        xs[k] = x;
        ys[k] = y;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = rings;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double inter = (sy - slope * sx) / n;
    FarfieldFit fit;
    fit.coefficient = -slope;
    fit.offset = inter;
    double rss = 0.0;
    for (int k = 0; k < rings; ++k) {
        const double e = ys[k] - (slope * xs[k] + inter);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

FarfieldFit farfield_fit_log(const ScalarField& u, double r_lo, double r_hi,
                             int rings, int samples) {
    auto ring_mean = [&u, samples](double r) {
        double s = 0.0;
        for (int k = 0; k < samples; ++k) {
            const double a = 2.0 * M_PI * k / samples;
            s += interpolate(u, {r * std::cos(a), r * std::sin(a)});
        }
        return s / samples;
    };
    return farfield_fit_log(ring_mean, r_lo, r_hi, rings);
}

FarfieldFit farfield_fit_power(const RadialProfile& u, double r_lo, double r_hi,
                               int rings, bool with_offset) {
    if (rings < 4) throw std::invalid_argument("farfield_fit: need >= 4 rings");
    if (!(r_lo > 0.0) || !(r_hi > r_lo)) {
        throw std::invalid_argument("farfield_fit: bad annulus");
    }
    const double p = 2.0 - u.dim.value();
    std::vector<double> fs(rings), ys(rings);
    double sff = 0.0, sfy = 0.0, sf = 0.0, sy = 0.0;
    for (int k = 0; k < rings; ++k) {
        const double r = r_lo + (r_hi - r_lo) * k / (rings - 1);
        fs[k] = std::pow(r, p);
        ys[k] = u.value_at(r);
        sff += fs[k] * fs[k];
        sfy += fs[k] * ys[k];
        sf += fs[k];
        sy += ys[k];
    }
    FarfieldFit fit;
    if (with_offset) {
        const double n = rings;
        fit.coefficient = (n * sfy - sf * sy) / (n * sff - sf * sf);
        fit.offset = (sy - fit.coefficient * sf) / n;
    } else {
        fit.coefficient = sfy / sff;
        fit.offset = 0.0;
    }
    double rss = 0.0;
    for (int k = 0; k < rings; ++k) {
        const double e = ys[k] - fit.coefficient * fs[k] - fit.offset;
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / rings);
    return fit;
}

ConeHeights cone_heights(const ScalarField& u, const PoleConfig& cfg) {
    const DiscMesh& mesh = u.mesh();
    ConeHeights out;
    for (const Pole& p : cfg.poles()) {
        const Vec2 xy = pole_xy(p);
        const int node = mesh.nearest_node(xy);
        if ((mesh.nodes[node] - xy).norm() > 1e-9 * std::max(1.0, mesh.radius)) {
            throw std::invalid_argument("cone_heights: pole is not a mesh node");
        }
        out.lambda.push_back(u[node]);
        double g = 0.0;
        const auto& grads = u.cell_gradients();
        for (int c : mesh.node_cells[node]) g = std::max(g, grads[c].norm());
        out.tip_grad.push_back(g);
    }
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.lambda.size(); ++i) {
        for (std::size_t j = i + 1; j < out.lambda.size(); ++j) {
            const double d =
                distance(cfg.poles()[i].point, cfg.poles()[j].point);
            const double margin = d - std::abs(out.lambda[i] - out.lambda[j]);
            out.worst_margin = std::min(out.worst_margin, margin);
            if (margin <= 0.0) out.separation_ok = false;
        }
    }
    return out;
}

std::vector<double> lightcone_indicator(const SolveResult& result,
                                        std::size_t pole_index) {
    std::vector<double> out;
    for (const LadderLevel& level : result.ladder) {
        if (pole_index >= level.tip_grad.size()) {
            throw std::out_of_range("lightcone_indicator: pole index");
        }
        out.push_back(level.tip_grad[pole_index]);
    }
    return out;
}

std::vector<LightSegment> lightlike_segment_scan(const ScalarField& u,
                                                 const PoleConfig& cfg,
                                                 double threshold,
                                                 int boundary_samples) {
    if (!(threshold > 0.0) || threshold >= 1.0) {
        throw std::invalid_argument("lightlike_segment_scan: threshold in (0,1)");
    }
    std::vector<LightSegment> found;
    const auto slope_between = [&u](Vec2 a, Vec2 b) {
        const double d = (a - b).norm();
        if (d <= 0.0) return 0.0;
        return std::abs(interpolate(u, a) - interpolate(u, b)) / d;
    };
    const auto record = [&found](Vec2 a, Vec2 b, double s) {
        found.push_back({{a.x, a.y}, {b.x, b.y}, s});
    };
    const auto& poles = cfg.poles();
    for (std::size_t i = 0; i < poles.size(); ++i) {
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            const Vec2 a = pole_xy(poles[i]);
            const Vec2 b = pole_xy(poles[j]);
            const double s = slope_between(a, b);
            if (s >= threshold) record(a, b, s);
        }
    }
    const double rb = u.mesh().radius * 0.98;
    for (const Pole& p : poles) {
        const Vec2 a = pole_xy(p);
        for (int k = 0; k < boundary_samples; ++k) {
            const double th = 2.0 * M_PI * k / boundary_samples;
            const Vec2 b{rb * std::cos(th), rb * std::sin(th)};
            const double s = slope_between(a, b);
            if (s >= threshold) record(a, b, s);
        }
    }
    return found;
}

std::vector<CheckResult> sandwich_check(const ScalarField& u,
                                        const PoleConfig& cfg, double R,
                                        double slack_rel, int mollifier_n) {
    std::vector<CheckResult> out;
    if (cfg.mixed_signs() || cfg.negative_mass() > 0.0) {
        CheckResult skip;
        skip.name = "sandwich";
        skip.theorem = "radial_envelope_bounds";
        skip.applicable = false;
        skip.pass = true;
        skip.note = "skipped: negative weights present";
        out.push_back(skip);
        return out;
    }
    const Dimension dim = cfg.dim();
    double sup_u = 0.0;
    for (double v : u.values()) sup_u = std::max(sup_u, std::abs(v));
    const double slack = slack_rel * sup_u;

    // Lower bound: u >= Phi_{N,a_j}(x - p_j) - Phi_{N,a_j}(R - |p_j|) on the
    // inscribed ball around each pole, sampled on mesh nodes. A finite
    // mollifier level only reaches the envelope's bump-edge value inside the
    // bump, so the envelope is clipped at r = 2/n there.
    const double core = mollifier_n > 0 ? 2.0 / mollifier_n : 0.0;
    double worst_lower = std::numeric_limits<double>::infinity();
    const DiscMesh& mesh = u.mesh();
    for (const Pole& p : cfg.poles()) {
        const Vec2 c = pole_xy(p);
        const double rj = R - c.norm();
        const double boundary_value = phi_value(dim, p.weight, rj);
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
            const double r = (mesh.nodes[i] - c).norm();
            if (r >= rj) continue;
            const double bound =
                phi_value(dim, p.weight, std::max(r, core)) - boundary_value;
            worst_lower = std::min(worst_lower, u[i] - bound);
        }
    }
    CheckResult lower;
    lower.name = "sandwich_lower";
    lower.theorem = "radial_envelope_bounds";
    lower.tol = slack;
    lower.margin = worst_lower;
    lower.pass = worst_lower >= -slack;
    out.push_back(lower);

    // Upper bound: max u <= Phi_{N,a0}(0) - Phi_{N,a0}(R).
    const double a0 = cfg.positive_mass();
    const double vmax =
        phi_value(dim, a0, 0.0) - phi_value(dim, a0, R);
    double umax = -std::numeric_limits<double>::infinity();
    for (double v : u.values()) umax = std::max(umax, v);
    CheckResult upper;
    upper.name = "sandwich_upper";
    upper.theorem = "radial_envelope_bounds";
    upper.tol = slack;
    upper.margin = vmax - umax;
    upper.pass = umax <= vmax + slack;
    out.push_back(upper);
    return out;
}

double RadialStaircase::value_at(double r) const {
    if (radii.empty()) return 0.0;
    const auto it = std::lower_bound(radii.begin(), radii.end(), r);
    if (it == radii.end()) return values.back();
    return values[static_cast<std::size_t>(it - radii.begin())];
}

namespace {

RadialStaircase rearrange_cells(const DiscMesh& mesh,
                                std::vector<double> cell_values) {
    std::vector<std::size_t> order(cell_values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&cell_values](std::size_t a, std::size_t b) {
                         return cell_values[a] > cell_values[b];
                     });
    RadialStaircase out;
    double area = 0.0;
    for (std::size_t k : order) {
        area += mesh.cell_areas[k];
        out.radii.push_back(std::sqrt(area / M_PI));
        out.values.push_back(cell_values[k]);
    }
    return out;
}

}  // namespace

RadialStaircase decreasing_rearrangement(const ScalarField& u) {
    const DiscMesh& mesh = u.mesh();
    std::vector<double> cell_values(mesh.cells.size());
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        const auto& tri = mesh.cells[c];
        cell_values[c] = (u[tri[0]] + u[tri[1]] + u[tri[2]]) / 3.0;
    }
    return rearrange_cells(mesh, std::move(cell_values));
}

RadialStaircase decreasing_rearrangement(const DiscMesh& mesh,
                                         const std::function<double(Vec2)>& f) {
    std::vector<double> cell_values(mesh.cells.size());
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        const auto& tri = mesh.cells[c];
        // mid-edge sampling, exact for quadratics
        const Vec2 a = mesh.nodes[tri[0]];
        const Vec2 b = mesh.nodes[tri[1]];
        const Vec2 d = mesh.nodes[tri[2]];
        cell_values[c] = (f((a + b) * 0.5) + f((b + d) * 0.5) + f((d + a) * 0.5)) / 3.0;
    }
    return rearrange_cells(mesh, std::move(cell_values));
}

RearrangementResult rearrangement_check(const DiscMesh& mesh,
                                        const SourceField& f,
                                        const SolverConfig& scfg,
                                        double slack_rel) {
    for (const Pole& p : f.config().poles()) {
        if (p.weight < 0.0) {
            throw std::domain_error("rearrangement_check: source must be nonnegative");
        }
    }
    const SolveResult solved = solve_dirichlet(mesh, f, scfg);
    RearrangementResult out;
    out.u_star = decreasing_rearrangement(solved.field);

    RadialStaircase f_star = decreasing_rearrangement(
        mesh, [&f](Vec2 p) { return f.value2d(p.x, p.y); });
    // trim the zero tail so the staircase support is tight
    std::size_t last = f_star.values.size();
    while (last > 1 && f_star.values[last - 1] <= 0.0) --last;
    f_star.values.resize(last);
    f_star.radii.resize(last);
    for (double& v : f_star.values) v = std::max(v, 0.0);

    const Dimension dim = f.config().dim();
    const RadialSource src =
        RadialSource::staircase(dim, f_star.radii, f_star.values);
    const double R = mesh.radius;
    out.u_of_fstar = radial_dirichlet(dim, src, R, make_radial_grid(R, 1024));

    double sup = 0.0;
    for (double v : out.u_of_fstar.values) sup = std::max(sup, std::abs(v));
    const double slack = slack_rel * sup;

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < out.u_star.radii.size(); ++k) {
        const double r_mid =
            k == 0 ? 0.5 * out.u_star.radii[0]
                   : 0.5 * (out.u_star.radii[k - 1] + out.u_star.radii[k]);
        const double diff =
            out.u_star.values[k] - out.u_of_fstar.value_at(r_mid);
        worst = std::max(worst, diff);
    }
    out.max_violation = worst;
    out.check.name = "rearrangement";
    out.check.theorem = "rearrangement_dominance";
    out.check.tol = slack;
    out.check.margin = -worst;
    out.check.pass = worst <= slack;
    return out;
}

GateResult mixed_mass_gate(const PoleConfig& cfg, double tol) {
    GateResult out;
    if (cfg.dim().value() < 3) {
        out.applicable = false;
        out.note = "stated for N >= 3";
        return out;
    }
    if (!cfg.mixed_signs()) {
        out.applicable = false;
        out.note = "single-signed configuration";
        return out;
    }
    out.applicable = true;
    const auto gaps = cfg.gaps();
    if (!gaps || !gaps->cross_sign_gap) {
        throw std::logic_error("mixed_mass_gate: missing cross-sign gap");
    }
    out.l0 = *gaps->cross_sign_gap;
    const double a0 = cfg.positive_mass();
    const double b0 = cfg.negative_mass();
    out.lhs = phi_nd(cfg.dim(), a0, 0.0, tol) + phi_nd(cfg.dim(), b0, 0.0, tol);
    out.margin = out.l0 - out.lhs;
    out.admissible = out.lhs < out.l0;

    // Sharper pointwise condition u_+(p) + u_-(q) > |p - q| for the closest
    // cross-sign pair, certified from below by the per-pole central heights.
    // Interpreted as |p - q|; the source text prints the degenerate |p - p|.
    double best = -std::numeric_limits<double>::infinity();
    for (const Pole& pi : cfg.poles()) {
        if (pi.weight <= 0.0) continue;
        for (const Pole& pj : cfg.poles()) {
            if (pj.weight >= 0.0) continue;
            const double d = distance(pi.point, pj.point);
            const double lhs = phi_nd(cfg.dim(), pi.weight, 0.0, tol) +
                               phi_nd(cfg.dim(), -pj.weight, 0.0, tol);
            best = std::max(best, lhs - d);
        }
    }
    out.sharper_lhs = best;
    out.sharper_certified = best > 0.0;
    out.note = "sharper condition read as u(p)+u(q) vs |p-q| (interpretation)";
    return out;
}

TruncationReport infinite_cone_truncation(const TruncationConfig& cfg) {
    if (cfg.poles.size() != cfg.weights.size() || cfg.poles.empty()) {
        throw std::invalid_argument("infinite_cone_truncation: poles/weights mismatch");
    }
    if (!std::isfinite(cfg.alpha_infinity) || cfg.alpha_infinity <= 0.0) {
        throw std::domain_error("infinite_cone_truncation: series sum must be finite");
    }
    double partial = 0.0;
    for (double w : cfg.weights) {
        if (w <= 0.0) {
            throw std::domain_error("infinite_cone_truncation: weights must be positive");
        }
        partial += w;
    }
    if (partial > cfg.alpha_infinity + 1e-12) {
        throw std::domain_error(
            "infinite_cone_truncation: partial sums exceed the declared series sum");
    }
    if (cfg.levels.empty() ||
        !std::is_sorted(cfg.levels.begin(), cfg.levels.end())) {
        throw std::invalid_argument("infinite_cone_truncation: levels must increase");
    }
    if (cfg.levels.back() > static_cast<int>(cfg.poles.size())) {
        throw std::invalid_argument("infinite_cone_truncation: level exceeds pole list");
    }

    const DiscMesh mesh =
        build_mesh(cfg.R, cfg.h, cfg.poles, cfg.refine_factor);
    const Dimension dim(2);

    double max_pole_r = 0.0;
    for (const Vec2& p : cfg.poles) max_pole_r = std::max(max_pole_r, p.norm());
    std::vector<double> radii = cfg.flux_radii;
    if (radii.empty()) {
        const double lo = max_pole_r + 0.25 * (cfg.R - max_pole_r);
        const double hi = cfg.R - 0.15 * cfg.R;
        radii = {lo, 0.5 * (lo + hi), hi};
    }

    TruncationReport report;
    report.alpha_infinity = cfg.alpha_infinity;
    std::vector<double> prev;
    for (int m : cfg.levels) {
        std::vector<Pole> poles;
        for (int j = 0; j < m; ++j) {
            poles.push_back({{cfg.poles[j].x, cfg.poles[j].y}, cfg.weights[j]});
        }
        const double r0 = std::max(1.0, 2.0 * max_pole_r + 0.5);
        const PoleConfig pc(dim, poles, 2.0 * r0);
        const SourceField source(pc, cfg.source_n);
        const SolveResult solved = solve_dirichlet(mesh, source, cfg.solver);

        TruncationLevel level;
        level.m = m;
        level.converged = solved.converged;
        if (!prev.empty()) {
            double d = 0.0;
            for (std::size_t i = 0; i < prev.size(); ++i) {
                d = std::max(d, std::abs(solved.field.values()[i] - prev[i]));
            }
            level.sup_delta = d;
        } else {
            level.sup_delta = std::numeric_limits<double>::infinity();
        }
        prev = solved.field.values();

        level.residue_mean = residue(solved.field, radii).mean;
        const double lo = radii.front();
        const double hi = radii.back();
        level.farfield_coeff =
            farfield_fit_log(solved.field, lo, hi, 6).coefficient;
        report.levels.push_back(level);
    }
    report.deltas_decreasing = true;
    for (std::size_t k = 2; k < report.levels.size(); ++k) {
        if (report.levels[k].sup_delta >= report.levels[k - 1].sup_delta) {
            report.deltas_decreasing = false;
        }
    }
    return report;
}

}  // namespace conefield
