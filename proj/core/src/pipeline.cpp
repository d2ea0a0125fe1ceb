#include "conefield/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace conefield {

namespace {

double max_pole_radius(const RunConfig& cfg) {
    double m = 0.0;
    for (const Pole& p : cfg.poles) {
        double s = 0.0;
        for (double v : p.point) s += v * v;
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

std::vector<Vec2> poles_xy(const RunConfig& cfg) {
    std::vector<Vec2> out;
    for (const Pole& p : cfg.poles) out.push_back({p.point[0], p.point[1]});
    return out;
}

void validate_common(const RunConfig& cfg) {
    if (cfg.poles.empty()) throw std::invalid_argument("config: no poles");
    if (!(cfg.R > 0.0) || !(cfg.h > 0.0) || cfg.h >= cfg.R) {
        throw std::invalid_argument("config: requires 0 < h < R");
    }
    if (cfg.R <= cfg.effective_r0()) {
        throw std::invalid_argument("config: R must exceed R0");
    }
}

}  // namespace

std::vector<double> default_flux_radii(const RunConfig& cfg) {
    const double hull = max_pole_radius(cfg);
    const double lo = hull + std::max(4.0 * cfg.h, 0.2 * (cfg.R - hull));
    const double hi = cfg.R - std::max(4.0 * cfg.h, 0.1 * cfg.R);
    return {lo, 0.5 * (lo + hi), hi};
}

std::pair<double, double> default_annulus(const RunConfig& cfg) {
    const double hull = max_pole_radius(cfg);
    const double lo = std::max(0.55 * cfg.R, hull + 0.3 * (cfg.R - hull));
    return {lo, 0.85 * cfg.R};
}

SolveArtifacts run_solve(const RunConfig& cfg) {
    validate_common(cfg);
    SolveArtifacts art;
    art.poles = cfg.pole_config();
    if (cfg.dim == 2) {
        auto mesh = std::make_shared<DiscMesh>(
            build_mesh(cfg.R, cfg.h, poles_xy(cfg), cfg.refine_factor));
        art.mesh = mesh;
        art.result = solve_dirac_ladder(*mesh, *art.poles, cfg.solver);
        return art;
    }
    // Radial reduction for N >= 3: a single positive pole at the origin.
    art.radial = true;
    if (cfg.poles.size() != 1 || cfg.poles[0].weight <= 0.0 ||
        max_pole_radius(cfg) > 1e-12) {
        throw std::invalid_argument(
            "config: N >= 3 solves are radial only (single positive pole at the origin)");
    }
    const Dimension dim(cfg.dim);
    const int n = cfg.solver.ladder_n.empty() ? 16 : cfg.solver.ladder_n.back();
    const RadialSource src =
        RadialSource::mollified_pole(dim, cfg.poles[0].weight, n);
    art.profile = radial_dirichlet(dim, src, cfg.R, make_radial_grid(cfg.R));
    return art;
}

namespace {

void battery_2d(const RunConfig& cfg, const SolveArtifacts& art,
                VerifyReport& report) {
    const SolveResult& res = *art.result;
    const PoleConfig& poles = *art.poles;
    const double total_abs = poles.positive_mass() + poles.negative_mass();
    const double net = poles.net_mass();

    {
        CheckResult c;
        c.name = "solver_converged";
        c.theorem = "ladder_cauchy";
        c.pass = res.converged;
        c.margin = res.ladder.empty()
                       ? 0.0
                       : -res.ladder.back().sup_delta;
        c.tol = cfg.solver.tol_ladder;
        report.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "spacelike_cap";
        c.theorem = "weakly_spacelike";
        c.margin = 1.0 - res.max_cell_grad;
        c.tol = 0.0;
        c.pass = res.max_cell_grad < 1.0;
        report.checks.push_back(c);
    }
    {
        const std::vector<double> radii = cfg.verify.flux_radii.empty()
                                              ? default_flux_radii(cfg)
                                              : cfg.verify.flux_radii;
        const ResidueResult r = residue(res.field, radii);
        const double tol = poles.mixed_signs() ? 0.05 : 0.03 * total_abs;
        CheckResult c;
        c.name = "residue_total_mass";
        c.theorem = "flux_equals_minus_mass";
        c.tol = tol;
        c.margin = tol - std::abs(r.mean + net);
        c.pass = c.margin >= 0.0;
        report.checks.push_back(c);

        CheckResult s;
        s.name = "residue_spread";
        s.theorem = "flux_radius_independence";
        s.tol = std::max(tol, 1e-3);
        s.margin = s.tol - r.spread;
        s.pass = s.margin >= 0.0;
        report.checks.push_back(s);
        report.meta["residue_mean"] = r.mean;
        report.meta["residue_per_radius"] = r.per_radius;
    }
    const int final_n = res.ladder.empty() ? 0 : res.ladder.back().n;
    for (CheckResult c :
         sandwich_check(res.field, poles, cfg.R, cfg.verify.slack, final_n)) {
        report.checks.push_back(c);
    }
    if (!poles.mixed_signs()) {
        // peak sits at a pole (positive masses)
        const DiscMesh& mesh = res.field.mesh();
        int argmax = 0;
        for (std::size_t i = 1; i < res.field.values().size(); ++i) {
            if (res.field[i] > res.field[argmax]) argmax = static_cast<int>(i);
        }
        double diam = 0.0;
        for (int cell : mesh.node_cells[argmax]) {
            diam = std::max(diam, mesh.cell_diameter(cell));
        }
        double dist = std::numeric_limits<double>::infinity();
        for (const Pole& p : poles.poles()) {
            dist = std::min(dist,
                            (mesh.nodes[argmax] - Vec2{p.point[0], p.point[1]}).norm());
        }
        CheckResult c;
        c.name = "max_at_pole";
        c.theorem = "peak_at_source";
        c.tol = diam;
        c.margin = diam - dist;
        c.pass = dist <= diam;
        report.checks.push_back(c);
    }
    if (poles.size() >= 2) {
        const ConeHeights heights = cone_heights(res.field, poles);
        CheckResult c;
        c.name = "height_separation";
        c.theorem = "cone_height_gap";
        c.margin = heights.worst_margin;
        c.tol = 0.0;
        c.pass = heights.separation_ok;
        report.checks.push_back(c);
        report.meta["lambda"] = heights.lambda;
        report.meta["tip_grad"] = heights.tip_grad;
    }
    {
        const auto segs = lightlike_segment_scan(
            res.field, poles, cfg.verify.segment_threshold);
        CheckResult c;
        c.name = "no_lightlike_segments";
        c.theorem = "strictly_spacelike_off_poles";
        c.tol = cfg.verify.segment_threshold;
        c.margin = segs.empty() ? 1.0 - cfg.verify.segment_threshold : -1.0;
        c.pass = segs.empty();
        if (!segs.empty()) {
            c.note = "segments found: " + std::to_string(segs.size());
        }
        report.checks.push_back(c);
    }
    {
        const auto [alo_d, ahi_d] = default_annulus(cfg);
        const double alo = cfg.verify.annulus_lo > 0.0 ? cfg.verify.annulus_lo : alo_d;
        const double ahi = cfg.verify.annulus_hi > 0.0 ? cfg.verify.annulus_hi : ahi_d;
        const FarfieldFit fit = farfield_fit_log(res.field, alo, ahi);
        const double expected = net / (2.0 * M_PI);
        const double tol = std::max(0.05 * std::abs(expected),
                                    0.02 * total_abs / (2.0 * M_PI));
        CheckResult c;
        c.name = "farfield_log_coefficient";
        c.theorem = "log_coefficient_equals_mass";
        c.tol = tol;
        c.margin = tol - std::abs(fit.coefficient - expected);
        c.pass = c.margin >= 0.0;
        report.checks.push_back(c);
        report.meta["farfield_coefficient"] = fit.coefficient;
    }
    {
        // gate stated for N >= 3
        CheckResult c;
        c.name = "mixed_mass_gate";
        c.theorem = "mixed_mass_admissibility";
        c.applicable = false;
        c.pass = true;
        c.note = "not applicable for N = 2";
        report.checks.push_back(c);
    }
}

void battery_radial(const RunConfig& cfg, VerifyReport& report) {
    const Dimension dim(cfg.dim);
    const PoleConfig poles = cfg.pole_config();
    if (poles.mixed_signs()) {
        const GateResult gate = mixed_mass_gate(poles);
        CheckResult c;
        c.name = "mixed_mass_gate";
        c.theorem = "mixed_mass_admissibility";
        c.applicable = gate.applicable;
        c.pass = gate.admissible;
        c.margin = gate.margin;
        c.tol = 0.0;
        c.note = gate.note;
        report.checks.push_back(c);
        report.meta["gate_lhs"] = gate.lhs;
        report.meta["gate_l0"] = gate.l0;
        return;
    }
    if (cfg.poles.size() != 1 || max_pole_radius(cfg) > 1e-12) {
        throw std::invalid_argument(
            "config: N >= 3 verification is radial only (single pole at origin)");
    }
    const double alpha = cfg.poles[0].weight;
    const double cn = dim.c_n();
    const double phi0 = phi_nd(dim, alpha, 0.0);
    const auto grid = make_radial_grid(cfg.R);
    for (int n : cfg.solver.ladder_n) {
        const RadialSource src = RadialSource::mollified_pole(dim, alpha, n);
        const RadialProfile v = radial_dirichlet(dim, src, cfg.R, grid);
        const double v0 = v.values.front();
        const double lower =
            phi0 - 2.0 / n - cn * alpha * std::pow(cfg.R, 2.0 - cfg.dim);
        CheckResult c;
        c.name = "radial_center_bounds_n" + std::to_string(n);
        c.theorem = "mollified_center_pinch";
        c.tol = 0.0;
        c.margin = std::min(v0 - lower, phi0 - v0);
        c.pass = v0 > lower && v0 < phi0;
        report.checks.push_back(c);
    }
    {
        const int n = cfg.solver.ladder_n.empty() ? 16 : cfg.solver.ladder_n.back();
        const RadialSource src = RadialSource::mollified_pole(dim, alpha, n);
        const RadialProfile v = radial_dirichlet(dim, src, cfg.R, grid);
        const auto [alo_d, ahi_d] = default_annulus(cfg);
        const double alo = cfg.verify.annulus_lo > 0.0 ? cfg.verify.annulus_lo : alo_d;
        const double ahi = cfg.verify.annulus_hi > 0.0 ? cfg.verify.annulus_hi : ahi_d;
        const FarfieldFit fit = farfield_fit_power(v, alo, ahi, 8, true);
        const double expected = cn * alpha;
        CheckResult c;
        c.name = "farfield_power_coefficient";
        c.theorem = "decay_coefficient_equals_mass";
        c.tol = 0.05 * expected;
        c.margin = c.tol - std::abs(fit.coefficient - expected);
        c.pass = c.margin >= 0.0;
        report.checks.push_back(c);
        report.meta["farfield_coefficient"] = fit.coefficient;

        // flux identity outside the mollifier support, by finite differences
        double worst = 0.0;
        const double expo = cfg.dim - 1;
        for (double r = std::max(1.5 * src.support_radius(), 0.15 * cfg.R);
             r < 0.9 * cfg.R; r += 0.05 * cfg.R) {
            const double dr = 1e-5 * cfg.R;
            const double du =
                (v.value_at(r + dr) - v.value_at(r - dr)) / (2.0 * dr);
            const double flux =
                std::pow(r, expo) * std::abs(du) / std::sqrt(1.0 - du * du);
            worst = std::max(worst, std::abs(flux - cn * alpha));
        }
        CheckResult fc;
        fc.name = "radial_flux_identity";
        fc.theorem = "flux_equals_minus_mass";
        fc.tol = 0.02 * cn * alpha + 1e-6;
        fc.margin = fc.tol - worst;
        fc.pass = fc.margin >= 0.0;
        report.checks.push_back(fc);
    }
}

}  // namespace

VerifyReport run_verify(const RunConfig& cfg) {
    validate_common(cfg);
    VerifyReport report;
    report.meta["dim"] = cfg.dim;
    report.meta["R"] = cfg.R;
    report.meta["h"] = cfg.h;
    report.meta["seed"] = cfg.seed;
    if (cfg.dim == 2) {
        const SolveArtifacts art = run_solve(cfg);
        battery_2d(cfg, art, report);
    } else {
        battery_radial(cfg, report);
    }
    return report;
}

void write_field_csv(const std::string& path, const SolveArtifacts& art) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output: " + path);
    out << "x,y,u,ux,uy,gradnorm\n";
    if (!art.radial) {
        const ScalarField& f = art.result->field;
        const DiscMesh& mesh = f.mesh();
        const auto& grads = f.cell_gradients();
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
            // area-weighted average of the incident cell gradients
            double wx = 0.0, wy = 0.0, wsum = 0.0;
            for (int c : mesh.node_cells[i]) {
                wx += grads[c].x * mesh.cell_areas[c];
                wy += grads[c].y * mesh.cell_areas[c];
                wsum += mesh.cell_areas[c];
            }
            const double gx = wsum > 0.0 ? wx / wsum : 0.0;
            const double gy = wsum > 0.0 ? wy / wsum : 0.0;
            out << format_double(mesh.nodes[i].x) << ','
                << format_double(mesh.nodes[i].y) << ','
                << format_double(f[i]) << ',' << format_double(gx) << ','
                << format_double(gy) << ','
                << format_double(std::hypot(gx, gy)) << '\n';
        }
        return;
    }
    const RadialProfile& v = *art.profile;
    for (std::size_t k = 0; k < v.grid.size(); ++k) {
        double du = 0.0;
        if (k + 1 < v.grid.size()) {
            du = (v.values[k + 1] - v.values[k]) / (v.grid[k + 1] - v.grid[k]);
        } else {
            du = (v.values[k] - v.values[k - 1]) / (v.grid[k] - v.grid[k - 1]);
        }
        out << format_double(v.grid[k]) << ",0," << format_double(v.values[k])
            << ',' << format_double(du) << ",0," << format_double(std::abs(du))
            << '\n';
    }
}

nlohmann::ordered_json solve_result_json(const RunConfig& cfg,
                                         const SolveArtifacts& art) {
    nlohmann::ordered_json j;
    j["mode"] = cfg.mode;
    j["dim"] = cfg.dim;
    if (!art.radial) {
        const SolveResult& res = *art.result;
        j["energy"] = res.energy;
        j["max_cell_grad"] = res.max_cell_grad;
        j["newton_iterations"] = res.newton_iterations;
        j["converged"] = res.converged;
        j["ladder"] = nlohmann::ordered_json::array();
        for (const LadderLevel& l : res.ladder) {
            nlohmann::ordered_json e;
            e["n"] = l.n;
            e["sup_delta"] = std::isfinite(l.sup_delta) ? l.sup_delta : -1.0;
            e["tip_grad"] = l.tip_grad;
            j["ladder"].push_back(e);
        }
        const std::vector<double> radii = cfg.verify.flux_radii.empty()
                                              ? default_flux_radii(cfg)
                                              : cfg.verify.flux_radii;
        const ResidueResult r = residue(res.field, radii);
        j["residue"] = {{"radii", r.radii},
                        {"per_radius", r.per_radius},
                        {"mean", r.mean},
                        {"spread", r.spread}};
    } else {
        const RadialProfile& v = *art.profile;
        j["converged"] = true;
        j["center_value"] = v.values.front();
        j["alpha"] = v.alpha;
        j["grid_nodes"] = v.grid.size();
    }
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace conefield
