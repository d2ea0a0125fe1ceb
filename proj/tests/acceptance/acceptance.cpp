// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavy solves are shared between the criteria that inspect them.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "conefield/analysis_verify.hpp"
#include "conefield/fundamental_radial.hpp"
#include "conefield/pipeline.hpp"
#include "conefield/source_mollifier.hpp"
#include "conefield/variational_solver.hpp"

#include "../test_util.hpp"

using namespace conefield;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& label, bool pass,
            const std::string& detail, double seconds) {
    std::printf("[%s] C%02d %-28s %s  (%.1fs)\n", pass ? "PASS" : "FAIL",
                criterion, label.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
            .count();
    }
};

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

double sup_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// ---------------------------------------------------------------- C1
void criterion_1() {
    Timer t;
    bool pass = true;
    std::string detail;

    // closed form re-derived through an independent expression
    double worst2d = 0.0;
    for (double alpha : {0.3, 1.0, 2.0 * M_PI, 11.0}) {
        const double c = alpha / (2.0 * M_PI);
        for (double r = 0.0; r <= 20.0; r += 0.37) {
            const double ref =
                -c * (std::log(r + std::sqrt(c * c + r * r)) - std::log(c));
            worst2d = std::max(worst2d, std::abs(phi_2d(alpha, r) - ref));
        }
    }
    pass = pass && worst2d < 1e-12;

    const double phi0 = phi_nd(Dimension(3), 4.0 * M_PI, 0.0, 1e-10);
    const double oracle = 1.8540746773013719;  // precomputed 30-digit quadrature
    pass = pass && std::abs(phi0 - oracle) < 1e-8;

    double worst_tail = 0.0;
    for (double alpha : {4.0 * M_PI, 2.0}) {
        const double c3a = Dimension(3).c_n() * alpha;
        const double r = 1e3;
        const double v = phi_nd(Dimension(3), alpha, r, 1e-12) * r;
        worst_tail = std::max(worst_tail, std::abs(v - c3a) / c3a);
    }
    pass = pass && worst_tail < 1e-3;

    detail = fmt("closed-form err %.1e, center err %.1e, tail rel %.1e", worst2d,
                 std::abs(phi0 - oracle), worst_tail);
    report(1, "fundamental exactness", pass, detail, t.seconds());
}

// ---------------------------------------------------------------- C2
void criterion_2() {
    Timer t;
    const Dimension d3(3);
    const double alpha = 1.0;
    const double R = 10.0;
    const double phi0 = phi_nd(d3, alpha, 0.0, 1e-12);
    const auto grid = make_radial_grid(R, 2048);
    bool pass = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int n : {4, 16, 64}) {
        const RadialSource src = RadialSource::mollified_pole(d3, alpha, n);
        const RadialProfile v = radial_dirichlet(d3, src, R, grid);
        const double v0 = v.values.front();
        const double lower = phi0 - 2.0 / n - d3.c_n() * alpha / R;
        pass = pass && v0 > lower && v0 < phi0;
        worst_margin = std::min({worst_margin, v0 - lower, phi0 - v0});
    }
    report(2, "radial center pinch", pass,
           fmt("strict margins >= %.2e", worst_margin), t.seconds());
}

// ---------------------------------------------------------------- C3
void criterion_3() {
    Timer t;
    const double R = 4.0;
    const double alpha = 1.0;
    const PoleConfig poles(Dimension(2), {{{0.0, 0.0}, alpha}}, 1.0);
    SolverConfig cfg;
    cfg.ladder_n = {4, 8, 16, 32, 64};

    const auto run_error = [&](double h, double* sup_u_out) {
        const DiscMesh mesh = build_mesh(R, h, {{0.0, 0.0}}, 4.0);
        const SolveResult res = solve_dirac_ladder(mesh, poles, cfg);
        const double sup_u = sup_abs(res.field.values());
        double err = 0.0;
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
            const double r = mesh.nodes[i].norm();
            if (r < 0.4) continue;
            const double expect = phi_2d(alpha, r) - phi_2d(alpha, R);
            err = std::max(err, std::abs(res.field[i] - expect));
        }
        if (sup_u_out) *sup_u_out = sup_u;
        return err;
    };

    double sup_u = 0.0;
    const double err_fine = run_error(R / 128.0, &sup_u);
    const double err_coarse = run_error(R / 64.0, nullptr);
    const bool pass = err_fine <= 0.05 * sup_u && err_coarse >= 1.5 * err_fine;
    report(3, "single-pole solve vs oracle", pass,
           fmt("sup err %.2e (tol %.2e), gain x%.2f", err_fine, 0.05 * sup_u,
               err_coarse / std::max(err_fine, 1e-300)),
           t.seconds());
}

// ---------------------------------------------------------- C4, C5, C8 share
struct TwoPoleRun {
    double R = 8.0;
    PoleConfig poles{Dimension(2), {{{-1.0, 0.0}, 1.0}, {{1.0, 0.0}, 2.0}}, 2.5};
    DiscMesh mesh = build_mesh(R, R / 96.0, {{-1.0, 0.0}, {1.0, 0.0}}, 4.0);
    SolveResult res = solve();

    SolveResult solve() const {
        SolverConfig cfg;
        cfg.ladder_n = {4, 8, 16, 32, 64};
        return solve_dirac_ladder(mesh, poles, cfg);
    }
};

void criterion_4(const TwoPoleRun& run) {
    Timer t;
    const ResidueResult r = residue(run.res.field, {3.0, 4.0, 5.0});
    const bool pass = run.res.converged &&
                      std::abs(r.mean + 3.0) <= 0.03 * 3.0 &&
                      r.spread <= 0.03 * 3.0;
    report(4, "two-pole residue", pass,
           fmt("mean %+.4f (want -3 +- %.3f), spread %.4f", r.mean, 0.09,
               r.spread),
           t.seconds());
}

void criterion_5(const TwoPoleRun& run) {
    Timer t;
    const auto checks = sandwich_check(run.res.field, run.poles, run.R, 0.02,
                                       run.res.ladder.back().n);
    bool pass = checks.size() == 2 && checks[0].pass && checks[1].pass;

    // peak within one cell of a pole
    const DiscMesh& mesh = run.mesh;
    int argmax = 0;
    for (std::size_t i = 1; i < run.res.field.values().size(); ++i) {
        if (run.res.field[i] > run.res.field[argmax]) {
            argmax = static_cast<int>(i);
        }
    }
    double diam = 0.0;
    for (int c : mesh.node_cells[argmax]) {
        diam = std::max(diam, mesh.cell_diameter(c));
    }
    double dist = std::numeric_limits<double>::infinity();
    for (const Pole& p : run.poles.poles()) {
        dist = std::min(dist,
                        (mesh.nodes[argmax] - Vec2{p.point[0], p.point[1]}).norm());
    }
    pass = pass && dist <= diam;
    report(5, "sandwich + max at pole", pass,
           fmt("lower margin %.2e, upper margin %.2e, argmax dist %.2e",
               checks[0].margin, checks[1].margin, dist),
           t.seconds());
}

void criterion_8(const TwoPoleRun& run) {
    Timer t;
    const FarfieldFit fit = farfield_fit_log(run.res.field, 5.0, 7.0, 8);
    const double expected = 3.0 / (2.0 * M_PI);
    const double rel = std::abs(fit.coefficient - expected) / expected;
    report(8, "log far-field coefficient", rel <= 0.05,
           fmt("A = %.5f (want %.5f, rel err %.3f)", fit.coefficient, expected,
               rel),
           t.seconds());
}

// ---------------------------------------------------------------- C6
void criterion_6() {
    Timer t;
    bool pass = true;
    std::string detail;

    // growth in the domain radius at fixed n and matched spacing
    {
        const double h = 1.0 / 12.0;
        const PoleConfig poles(
            Dimension(2), {{{-0.5, 0.0}, 1.0}, {{0.5, 0.0}, 2.0}}, 1.8);
        SolverConfig cfg;
        cfg.ladder_n = {8};
        const DiscMesh mesh_r =
            build_mesh(4.0, h, {{-0.5, 0.0}, {0.5, 0.0}}, 2.0);
        const DiscMesh mesh_2r =
            build_mesh(8.0, h, {{-0.5, 0.0}, {0.5, 0.0}}, 2.0);
        const SolveResult u_r =
            solve_dirichlet(mesh_r, SourceField(poles, 8), cfg);
        const SolveResult u_2r =
            solve_dirichlet(mesh_2r, SourceField(poles, 8), cfg);
        const double sup = sup_abs(u_r.field.values());
        double worst = 0.0;
        for (std::size_t i = 0; i < mesh_r.nodes.size(); ++i) {
            if (mesh_r.nodes[i].norm() > 3.6) continue;
            const double gap =
                u_r.field[i] - interpolate(u_2r.field, mesh_r.nodes[i]);
            worst = std::max(worst, gap);
        }
        pass = pass && worst <= 0.02 * sup;
        detail += fmt("R-growth worst gap %.2e (tol %.2e); ", worst, 0.02 * sup);
    }

    // growth in the source mass, 20 seeded pairs
    {
        const DiscMesh mesh = build_mesh(2.0, 1.0 / 12.0);
        TestRng rng(20260810);
        SolverConfig cfg;
        cfg.ladder_n = {8};
        int violations = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const double x = rng.uniform(-0.4, 0.4);
            const double y = rng.uniform(-0.4, 0.4);
            const double w2 = rng.uniform(0.2, 0.8);
            const double w1 = w2 + rng.uniform(0.05, 1.0);
            const PoleConfig big(Dimension(2), {{{x, y}, w1}}, 2.0);
            const PoleConfig small(Dimension(2), {{{x, y}, w2}}, 2.0);
            const SolveResult u1 =
                solve_dirichlet(mesh, SourceField(big, 8), cfg);
            const SolveResult u2 =
                solve_dirichlet(mesh, SourceField(small, 8), cfg);
            const double sup2 = sup_abs(u2.field.values());
            for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
                if (u1.field[i] < u2.field[i] - 0.02 * sup2) {
                    ++violations;
                    break;
                }
            }
        }
        pass = pass && violations == 0;
        detail += fmt("mass-growth violations %d/20", violations);
    }
    report(6, "monotonicity", pass, detail, t.seconds());
}

// ---------------------------------------------------------------- C7
void criterion_7() {
    Timer t;
    const double R = 4.0;
    TestRng rng(711);
    SolverConfig cfg;
    cfg.ladder_n = {4};
    bool pass = true;
    double worst_coarse = 0.0, worst_fine = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double x1 = rng.uniform(-0.9, 0.9);
        const double y1 = rng.uniform(-0.9, 0.9);
        double x2 = rng.uniform(-0.9, 0.9);
        double y2 = rng.uniform(-0.9, 0.9);
        if (std::hypot(x1 - x2, y1 - y2) < 0.15) x2 += 0.3;
        const double w1 = rng.uniform(0.3, 1.2);
        const double w2 = rng.uniform(0.3, 1.2);
        const PoleConfig poles(Dimension(2), {{{x1, y1}, w1}, {{x2, y2}, w2}},
                               4.0);
        const SourceField f(poles, 4);
        for (int level = 0; level < 2; ++level) {
            const double h = level == 0 ? R / 24.0 : R / 48.0;
            const DiscMesh mesh =
                build_mesh(R, h, {{x1, y1}, {x2, y2}}, 2.0);
            const RearrangementResult res =
                rearrangement_check(mesh, f, cfg, 0.02);
            pass = pass && res.check.pass;
            double& worst = level == 0 ? worst_coarse : worst_fine;
            worst = std::max(worst, std::max(res.max_violation, 0.0));
        }
    }
    // discretization slack must shrink under h halving
    pass = pass && worst_fine <= std::max(worst_coarse, 1e-12) * 1.001;
    report(7, "rearrangement dominance", pass,
           fmt("violation %.2e -> %.2e under h halving", worst_coarse,
               worst_fine),
           t.seconds());
}

// ---------------------------------------------------------------- C9
void criterion_9() {
    Timer t;
    const double R = 4.5;
    const PoleConfig poles(Dimension(2),
                           {{{-0.75, 0.0}, 4.0}, {{0.75, 0.0}, 1.0}}, 2.0);
    const DiscMesh mesh =
        build_mesh(R, R / 72.0, {{-0.75, 0.0}, {0.75, 0.0}}, 4.0);
    SolverConfig cfg;
    cfg.ladder_n = {4, 8, 16, 32, 64, 128, 256};
    cfg.tol_ladder = 1e-6;  // walk the full schedule
    const SolveResult res = solve_dirac_ladder(mesh, poles, cfg);

    const ConeHeights heights = cone_heights(res.field, poles);
    const double sep = std::abs(heights.lambda[0] - heights.lambda[1]);
    bool pass = sep < 1.5;

    bool indicators_ok = true;
    std::string ind_note;
    for (std::size_t pole = 0; pole < 2; ++pole) {
        const auto ind = lightcone_indicator(res, pole);
        int run = 1, best_run = 1;
        for (std::size_t k = 1; k < ind.size(); ++k) {
            run = ind[k] > ind[k - 1] ? run + 1 : 1;
            best_run = std::max(best_run, run);
        }
        indicators_ok = indicators_ok && ind.back() >= 0.9 && best_run >= 3;
        ind_note += fmt("%s%.3f", pole ? "/" : "", ind.back());
    }
    pass = pass && indicators_ok;
    report(9, "cone diagnostics", pass,
           fmt("|l1-l2| = %.3f < 1.5, final tip grads %s", sep, ind_note.c_str()),
           t.seconds());
}

// ---------------------------------------------------------------- C10
void criterion_10() {
    Timer t;
    bool pass = true;
    std::string detail;
    {
        const PoleConfig gate_cfg(
            Dimension(3),
            {{{-1.0, 0.0, 0.0}, 1.0}, {{1.0, 0.0, 0.0}, -1.0}}, 4.0);
        const GateResult g = mixed_mass_gate(gate_cfg);
        pass = pass && g.applicable && g.admissible && g.margin > 0.0;
        detail += fmt("gate margin %.3f; ", g.margin);

        const PoleConfig bad_cfg(
            Dimension(3),
            {{{-1.0, 0.0, 0.0}, 100.0}, {{1.0, 0.0, 0.0}, -100.0}}, 4.0);
        const GateResult bad = mixed_mass_gate(bad_cfg);
        pass = pass && bad.applicable && !bad.admissible && bad.margin < 0.0;
        detail += fmt("bad margin %.3f; ", bad.margin);
    }
    {
        const double R = 6.0;
        const PoleConfig poles(Dimension(2),
                               {{{-1.0, 0.0}, 1.0}, {{1.0, 0.0}, -1.0}}, 2.5);
        const DiscMesh mesh =
            build_mesh(R, R / 72.0, {{-1.0, 0.0}, {1.0, 0.0}}, 4.0);
        SolverConfig cfg;
        cfg.ladder_n = {4, 8, 16, 32};
        const SolveResult res = solve_dirac_ladder(mesh, poles, cfg);
        const ResidueResult r = residue(res.field, {2.5, 3.0, 3.5});
        pass = pass && std::abs(r.mean) <= 0.05;
        const auto segs = lightlike_segment_scan(res.field, poles, 0.98, 64);
        pass = pass && segs.empty();
        detail += fmt("2D residue %+.4f, segments %zu", r.mean, segs.size());
    }
    report(10, "mixed masses", pass, detail, t.seconds());
}

// ---------------------------------------------------------------- C11
void criterion_11() {
    Timer t;
    TruncationConfig cfg;
    cfg.R = 4.0;
    cfg.h = 1.0 / 16.0;
    cfg.refine_factor = 2.0;
    cfg.alpha_infinity = 1.0;
    cfg.levels = {2, 4, 8};
    cfg.source_n = 8;
    cfg.solver.ladder_n = {8};
    cfg.flux_radii = {1.6, 2.4, 3.2};
    for (int j = 1; j <= 8; ++j) {
        cfg.poles.push_back({0.8 - 0.8 * std::pow(2.0, 1.0 - j), 0.0});
        cfg.weights.push_back(std::pow(2.0, -j));
    }
    const TruncationReport rep = infinite_cone_truncation(cfg);
    bool deltas_ok = true;
    for (std::size_t k = 2; k < rep.levels.size(); ++k) {
        deltas_ok = deltas_ok &&
                    rep.levels[k].sup_delta < rep.levels[k - 1].sup_delta;
    }
    const double res8 = rep.levels.back().residue_mean;
    const bool pass = deltas_ok && std::abs(res8 + 1.0) <= 0.1;
    report(11, "infinite-cone truncation", pass,
           fmt("deltas %.3e > %.3e, residue(m=8) %+.4f", rep.levels[1].sup_delta,
               rep.levels[2].sup_delta, res8),
           t.seconds());
}

// ---------------------------------------------------------------- C12
void criterion_12() {
    Timer t;
    const DiscMesh mesh = build_mesh(1.0, 0.2);
    const PoleConfig poles(Dimension(2), {{{0.1, -0.05}, 0.7}}, 1.0);
    const SourceField source(poles, 4);
    TestRng rng(1212);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> u(mesh.nodes.size(), 0.0);
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!mesh.node_on_boundary[i]) u[i] = rng.uniform(-1.0, 1.0);
        }
        {
            const ScalarField probe(mesh, u);
            double mg = 0.0;
            for (const Vec2& g : probe.cell_gradients()) {
                mg = std::max(mg, g.norm());
            }
            const double scale = rng.uniform(0.3, 0.6) / std::max(mg, 1e-12);
            for (double& v : u) v *= scale;
        }
        const ScalarField f(mesh, u);
        const std::vector<double> grad = energy_gradient(f, source);
        for (int k = 0; k < 10; ++k) {
            std::vector<double> d(u.size(), 0.0);
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (!mesh.node_on_boundary[i]) d[i] = rng.uniform(-1.0, 1.0);
            }
            double predicted = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) predicted += grad[i] * d[i];
            const double step = 1e-6;
            std::vector<double> up(u), um(u);
            for (std::size_t i = 0; i < d.size(); ++i) {
                up[i] += step * d[i];
                um[i] -= step * d[i];
            }
            const double fd = (energy(ScalarField(mesh, up), source) -
                               energy(ScalarField(mesh, um), source)) /
                              (2.0 * step);
            const double rel = std::abs(fd - predicted) /
                               std::max({std::abs(fd), std::abs(predicted), 1e-8});
            worst = std::max(worst, rel);
        }
    }
    report(12, "gradient vs finite differences", worst <= 1e-6,
           fmt("worst relative error %.2e", worst), t.seconds());
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    {
        Timer shared;
        const TwoPoleRun run;
        std::printf("  .. shared two-pole solve on B_8 ready (%.1fs)\n",
                    shared.seconds());
        criterion_4(run);
        criterion_5(run);
        criterion_8(run);
    }
    criterion_6();
    criterion_7();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria FAILED\n", g_failures);
    }
    return g_failures;
}
