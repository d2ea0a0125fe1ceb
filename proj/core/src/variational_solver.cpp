#include "conefield/variational_solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conefield {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Sparse nodal load vector b_i = <source, hat_i>.
struct Load {
    std::vector<int> index;
    std::vector<double> value;

    double dot(const std::vector<double>& u) const {
        double s = 0.0;
        for (std::size_t k = 0; k < index.size(); ++k) {
            s += value[k] * u[index[k]];
        }
        return s;
    }
};

Vec2 pole_xy(const Pole& p) {
    return {p.point[0], p.point[1]};
}

// Per-pole polar quadrature of the mollified bump against the P1 basis.
// Radial Gauss-Legendre panels on [0, 1/n] and [1/n, 2/n], uniform angles.
// Partition of unity makes the total mass exact to the rule's accuracy
// regardless of how cells cut the bump.
Load mollified_load(const DiscMesh& mesh, const SourceField& source) {
    static const double gl_x[6] = {-0.9324695142031521, -0.6612093864662645,
                                   -0.2386191860831969, 0.2386191860831969,
                                   0.6612093864662645,  0.9324695142031521};
    static const double gl_w[6] = {0.1713244923791704, 0.3607615730481386,
                                   0.4679139345726910, 0.4679139345726910,
                                   0.3607615730481386, 0.1713244923791704};
    const int n_ang = 32;
    const Mollifier& eta = source.mollifier();
    std::vector<double> dense(mesh.nodes.size(), 0.0);
    for (const Pole& pole : source.config().poles()) {
        const Vec2 c = pole_xy(pole);
        const double half = 0.5 * eta.support_radius();
        for (int panel = 0; panel < 2; ++panel) {
            const double a = panel * half;
            const double m = a + 0.5 * half;
            for (int q = 0; q < 6; ++q) {
                const double r = m + 0.5 * half * gl_x[q];
                const double wr = 0.5 * half * gl_w[q] * r * pole.weight *
                                  eta.radial(r) * (2.0 * M_PI / n_ang);
                if (wr == 0.0) continue;
                for (int k = 0; k < n_ang; ++k) {
                    const double th = 2.0 * M_PI * k / n_ang;
                    const Vec2 x{c.x + r * std::cos(th), c.y + r * std::sin(th)};
                    const int cell = mesh.locate(x);
                    if (cell < 0) {
                        throw std::domain_error(
                            "mollified_load: source support leaves the mesh");
                    }
                    const auto l = mesh.barycentric(cell, x);
                    const auto& tri = mesh.cells[cell];
                    for (int v = 0; v < 3; ++v) dense[tri[v]] += wr * l[v];
                }
            }
        }
    }
    Load out;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0.0) {
            out.index.push_back(static_cast<int>(i));
            out.value.push_back(dense[i]);
        }
    }
    return out;
}

Load dirac_load(const DiscMesh& mesh, const PoleConfig& poles) {
    Load out;
    for (const Pole& pole : poles.poles()) {
        const Vec2 p = pole_xy(pole);
        const int node = mesh.nearest_node(p);
        if ((mesh.nodes[node] - p).norm() > 1e-9 * std::max(1.0, mesh.radius)) {
            throw std::invalid_argument("dirac_load: pole is not a mesh node");
        }
        out.index.push_back(node);
        out.value.push_back(pole.weight);
    }
    return out;
}

double area_energy(const DiscMesh& mesh, const std::vector<double>& u,
                   double* max_grad = nullptr) {
    double e = 0.0;
    double mg = 0.0;
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        Vec2 g{0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            g = g + mesh.cell_grads[c][k] * u[mesh.cells[c][k]];
        }
        const double g2 = g.dot(g);
        if (g2 >= 1.0) {
            throw std::domain_error("energy: field has a cell with |grad| >= 1");
        }
        mg = std::max(mg, std::sqrt(g2));
        // 1 - sqrt(1 - g2), written to stay accurate for small g2
        e += mesh.cell_areas[c] * (g2 / (1.0 + std::sqrt(1.0 - g2)));
    }
    if (max_grad) *max_grad = mg;
    return e;
}

std::vector<double> flux_residual(const DiscMesh& mesh,
                                  const std::vector<double>& u) {
    std::vector<double> r(mesh.nodes.size(), 0.0);
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        Vec2 g{0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            g = g + mesh.cell_grads[c][k] * u[mesh.cells[c][k]];
        }
        const double g2 = g.dot(g);
        if (g2 >= 1.0) {
            throw std::domain_error("energy_gradient: field has |grad| >= 1");
        }
        const Vec2 flux = g * (1.0 / std::sqrt(1.0 - g2));
        for (int k = 0; k < 3; ++k) {
            r[mesh.cells[c][k]] += mesh.cell_areas[c] * flux.dot(mesh.cell_grads[c][k]);
        }
    }
    return r;
}

struct NewtonOutcome {
    bool converged = false;
    int iterations = 0;
};

// Damped Newton on the discrete energy with the per-cell gradient cap
// |grad w| <= 1 - eps enforced exactly: the gradient is affine in the step
// length, so the largest feasible step solves a per-cell quadratic.
class NewtonSolver {
public:
    NewtonSolver(const DiscMesh& mesh, const Load& load, const SolverConfig& cfg)
        : mesh_(mesh), load_(load), cfg_(cfg) {
        interior_.assign(mesh.nodes.size(), -1);
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
            if (!mesh.node_on_boundary[i]) {
                interior_[i] = n_free_;
                ++n_free_;
            }
        }
        solver_initialized_ = false;
    }

    double energy_of(const std::vector<double>& u) const {
        return area_energy(mesh_, u) - load_.dot(u);
    }

    NewtonOutcome run(std::vector<double>& u, double eps_cap,
                      std::vector<double>* energy_history) {
        NewtonOutcome out;
        const double cap = 1.0 - eps_cap;
        const double saturation = 1.0 - 1.1 * eps_cap;
        double e_prev = energy_of(u);
        if (energy_history) energy_history->push_back(e_prev);
        for (int iter = 0; iter < cfg_.max_newton; ++iter) {
            std::vector<double> r = flux_residual(mesh_, u);
            for (std::size_t k = 0; k < load_.index.size(); ++k) {
                r[load_.index[k]] -= load_.value[k];
            }
            if (residual_converged(r, u, saturation)) {
                out.converged = true;
                out.iterations = iter;
                return out;
            }
            Eigen::VectorXd rhs(n_free_);
            for (std::size_t i = 0; i < interior_.size(); ++i) {
                if (interior_[i] >= 0) rhs[interior_[i]] = -r[i];
            }
            Eigen::VectorXd delta = solve_linear(u, rhs);
            std::vector<double> dir(mesh_.nodes.size(), 0.0);
            for (std::size_t i = 0; i < interior_.size(); ++i) {
                if (interior_[i] >= 0) dir[i] = delta[interior_[i]];
            }
            const double slope = -rhs.dot(delta);  // r . delta, negative
            const double t_cap = max_feasible_step(u, dir, cap);
            double t = std::min(1.0, 0.999 * t_cap);
            bool accepted = false;
            // absolute slack keeps the comparison meaningful once the energy
            // decrement falls below floating-point resolution
            const double fp_slack = 1e-15 * (1.0 + std::abs(e_prev));
            for (int bt = 0; bt < cfg_.max_backtracks; ++bt) {
                std::vector<double> trial = u;
                for (std::size_t i = 0; i < trial.size(); ++i) {
                    trial[i] += t * dir[i];
                }
                const double e_trial = energy_of(trial);
                if (e_trial <= e_prev + cfg_.armijo * t * slope + fp_slack) {
                    u = std::move(trial);
                    e_prev = e_trial;
                    accepted = true;
                    break;
                }
                t *= cfg_.backtrack;
            }
            out.iterations = iter + 1;
            if (energy_history) energy_history->push_back(e_prev);
            if (!accepted) return out;  // stalled
            if (energy_history && energy_history->size() >= 3) {
                const auto& h = *energy_history;
                const double scale = 1.0 + std::abs(e_prev);
                if (std::abs(h[h.size() - 1] - h[h.size() - 2]) <= cfg_.tol_energy * scale &&
                    std::abs(h[h.size() - 2] - h[h.size() - 3]) <= cfg_.tol_energy * scale) {
                    // energy has stalled at the cap; report first-order status
                    std::vector<double> rr = flux_residual(mesh_, u);
                    for (std::size_t k = 0; k < load_.index.size(); ++k) {
                        rr[load_.index[k]] -= load_.value[k];
                    }
                    out.converged = residual_converged(rr, u, saturation);
                    return out;
                }
            }
        }
        std::vector<double> r = flux_residual(mesh_, u);
        for (std::size_t k = 0; k < load_.index.size(); ++k) {
            r[load_.index[k]] -= load_.value[k];
        }
        out.converged = residual_converged(r, u, saturation);
        return out;
    }

private:
    bool residual_converged(const std::vector<double>& r,
                            const std::vector<double>& u, double saturation) {
        // First-order optimality is required on nodes clear of cap-saturated
        // cells; saturated cells carry the active constraint.
        std::vector<char> saturated_node(mesh_.nodes.size(), 0);
        for (std::size_t c = 0; c < mesh_.cells.size(); ++c) {
            Vec2 g{0.0, 0.0};
            for (int k = 0; k < 3; ++k) {
                g = g + mesh_.cell_grads[c][k] * u[mesh_.cells[c][k]];
            }
            if (g.norm() >= saturation) {
                for (int k = 0; k < 3; ++k) saturated_node[mesh_.cells[c][k]] = 1;
            }
        }
        double sup = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (interior_[i] >= 0 && !saturated_node[i]) {
                sup = std::max(sup, std::abs(r[i]));
            }
        }
        return sup <= cfg_.tol_residual;
    }

    Eigen::VectorXd solve_linear(const std::vector<double>& u,
                                 const Eigen::VectorXd& rhs) {
        std::vector<Triplet> trips;
        trips.reserve(mesh_.cells.size() * 9);
        for (std::size_t c = 0; c < mesh_.cells.size(); ++c) {
            Vec2 g{0.0, 0.0};
            for (int k = 0; k < 3; ++k) {
                g = g + mesh_.cell_grads[c][k] * u[mesh_.cells[c][k]];
            }
            const double g2 = g.dot(g);
            const double w = std::sqrt(std::max(1.0 - g2, 1e-14));
            const double iw = 1.0 / w;
            const double iw3 = iw * iw * iw;
            for (int a = 0; a < 3; ++a) {
                const int ia = interior_[mesh_.cells[c][a]];
                if (ia < 0) continue;
                const Vec2 ga = mesh_.cell_grads[c][a];
                const double gga = g.dot(ga);
                for (int b = 0; b < 3; ++b) {
                    const int ib = interior_[mesh_.cells[c][b]];
                    if (ib < 0) continue;
                    const Vec2 gb = mesh_.cell_grads[c][b];
                    const double v = mesh_.cell_areas[c] *
                                     (ga.dot(gb) * iw + gga * g.dot(gb) * iw3);
                    trips.emplace_back(ia, ib, v);
                }
            }
        }
        SpMat H(n_free_, n_free_);
        H.setFromTriplets(trips.begin(), trips.end());
        if (!solver_initialized_) {
            solver_.analyzePattern(H);
            solver_initialized_ = true;
        }
        solver_.factorize(H);
        if (solver_.info() != Eigen::Success) {
            // fall back with a diagonal shift; the energy Hessian can become
            // numerically semidefinite at tight caps
            SpMat I(n_free_, n_free_);
            I.setIdentity();
            double shift = 1e-10;
            for (int k = 0; k < 8; ++k) {
                SpMat Hs = H + I * shift;
                solver_.factorize(Hs);
                if (solver_.info() == Eigen::Success) break;
                shift *= 100.0;
            }
            if (solver_.info() != Eigen::Success) {
                throw std::runtime_error("solve_dirichlet: Hessian factorization failed");
            }
        }
        return solver_.solve(rhs);
    }

    double max_feasible_step(const std::vector<double>& u,
                             const std::vector<double>& dir, double cap) const {
        double t_max = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < mesh_.cells.size(); ++c) {
            Vec2 g{0.0, 0.0};
            Vec2 d{0.0, 0.0};
            for (int k = 0; k < 3; ++k) {
                g = g + mesh_.cell_grads[c][k] * u[mesh_.cells[c][k]];
                d = d + mesh_.cell_grads[c][k] * dir[mesh_.cells[c][k]];
            }
            const double a = d.dot(d);
            if (a <= 1e-30) continue;
            const double b = g.dot(d);
            const double c0 = g.dot(g) - cap * cap;  // negative while feasible
            const double disc = b * b - a * c0;
            const double root = (-b + std::sqrt(std::max(disc, 0.0))) / a;
            if (root > 0.0) t_max = std::min(t_max, root);
        }
        return t_max;
    }

    const DiscMesh& mesh_;
    const Load& load_;
    const SolverConfig& cfg_;
    std::vector<int> interior_;
    int n_free_ = 0;
    Eigen::SimplicialLDLT<SpMat> solver_;
    bool solver_initialized_;
};

void check_pole_dim(const PoleConfig& poles) {
    if (poles.dim().value() != 2) {
        throw std::invalid_argument("solver: mesh solves require a 2D pole config");
    }
}

SolveResult finish_result(const DiscMesh& mesh, std::vector<double> u,
                          const Load& load, const NewtonOutcome& outcome,
                          std::vector<double> history) {
    ScalarField field(mesh, std::move(u));
    double mg = 0.0;
    const double e = area_energy(mesh, field.values(), &mg) - load.dot(field.values());
    SolveResult res{std::move(field), e, mg, outcome.iterations,
                    outcome.converged, std::move(history), {}};
    return res;
}

SolveResult solve_with_load(const DiscMesh& mesh, const Load& load,
                            const SolverConfig& cfg,
                            const std::vector<double>* warm_start) {
    NewtonSolver newton(mesh, load, cfg);
    std::vector<double> u(mesh.nodes.size(), 0.0);
    std::vector<double> history;
    NewtonOutcome outcome;
    if (warm_start) {
        u = *warm_start;
        outcome = newton.run(u, cfg.eps_cap.back(), &history);
    } else {
        for (double eps : cfg.eps_cap) {
            const NewtonOutcome level = newton.run(u, eps, &history);
            outcome.converged = level.converged;
            outcome.iterations += level.iterations;
        }
    }
    return finish_result(mesh, std::move(u), load, outcome, std::move(history));
}

}  // namespace

double energy(const ScalarField& w, const SourceField& source) {
    check_pole_dim(source.config());
    const Load load = mollified_load(w.mesh(), source);
    return area_energy(w.mesh(), w.values()) - load.dot(w.values());
}

double energy(const ScalarField& w, const PoleConfig& poles) {
    check_pole_dim(poles);
    double src = 0.0;
    for (const Pole& p : poles.poles()) {
        src += p.weight * interpolate(w, pole_xy(p));
    }
    return area_energy(w.mesh(), w.values()) - src;
}

std::vector<double> energy_gradient(const ScalarField& w, const SourceField& source) {
    check_pole_dim(source.config());
    std::vector<double> r = flux_residual(w.mesh(), w.values());
    const Load load = mollified_load(w.mesh(), source);
    for (std::size_t k = 0; k < load.index.size(); ++k) {
        r[load.index[k]] -= load.value[k];
    }
    return r;
}

std::vector<double> energy_gradient(const ScalarField& w, const PoleConfig& poles) {
    check_pole_dim(poles);
    std::vector<double> r = flux_residual(w.mesh(), w.values());
    const Load load = dirac_load(w.mesh(), poles);
    for (std::size_t k = 0; k < load.index.size(); ++k) {
        r[load.index[k]] -= load.value[k];
    }
    return r;
}

SolveResult solve_dirichlet(const DiscMesh& mesh, const SourceField& source,
                            const SolverConfig& cfg) {
    check_pole_dim(source.config());
    const Load load = mollified_load(mesh, source);
    return solve_with_load(mesh, load, cfg, nullptr);
}

std::vector<double> pole_tip_gradients(const ScalarField& f, const PoleConfig& poles) {
    const DiscMesh& mesh = f.mesh();
    const auto& grads = f.cell_gradients();
    std::vector<double> out;
    for (const Pole& p : poles.poles()) {
        const int node = mesh.nearest_node(pole_xy(p));
        double best = 0.0;
        for (int c : mesh.node_cells[node]) {
            best = std::max(best, grads[c].norm());
        }
        out.push_back(best);
    }
    return out;
}

SolveResult solve_dirac_ladder(const DiscMesh& mesh, const PoleConfig& poles,
                               const SolverConfig& cfg) {
    check_pole_dim(poles);
    if (mesh.radius <= 2.0 * poles.r0()) {
        throw std::invalid_argument("solve_dirac_ladder: requires R > 2 R0");
    }
    if (cfg.ladder_n.empty()) {
        throw std::invalid_argument("solve_dirac_ladder: empty ladder schedule");
    }
    for (const Pole& p : poles.poles()) {
        const int node = mesh.nearest_node(pole_xy(p));
        if ((mesh.nodes[node] - pole_xy(p)).norm() >
            1e-9 * std::max(1.0, mesh.radius)) {
            throw std::invalid_argument("solve_dirac_ladder: pole is not a mesh node");
        }
    }

    SolveResult result{ScalarField(mesh), 0.0, 0.0, 0, false, {}, {}};
    std::vector<double> prev;
    bool have_prev = false;
    for (std::size_t level = 0; level < cfg.ladder_n.size(); ++level) {
        const int n = cfg.ladder_n[level];
        Load load;
        if (cfg.dirac_source) {
            load = dirac_load(mesh, poles);
        } else {
            const SourceField source(poles, n);
            load = mollified_load(mesh, source);
        }
        SolveResult lvl = solve_with_load(mesh, load, cfg, have_prev ? &prev : nullptr);

        LadderLevel entry;
        entry.n = n;
        entry.tip_grad = pole_tip_gradients(lvl.field, poles);
        if (have_prev) {
            double d = 0.0;
            for (std::size_t i = 0; i < prev.size(); ++i) {
                d = std::max(d, std::abs(lvl.field.values()[i] - prev[i]));
            }
            entry.sup_delta = d;
        } else {
            entry.sup_delta = std::numeric_limits<double>::infinity();
        }
        prev = lvl.field.values();
        have_prev = true;

        result.ladder.push_back(entry);
        result.field = std::move(lvl.field);
        result.energy = lvl.energy;
        result.max_cell_grad = lvl.max_cell_grad;
        result.newton_iterations += lvl.newton_iterations;
        result.converged = lvl.converged;
        for (double e : lvl.energy_history) result.energy_history.push_back(e);

        if (level > 0 && entry.sup_delta <= cfg.tol_ladder) break;
        if (cfg.dirac_source) break;  // the direct load does not ladder in n
    }
    // Cauchy flag: deltas must trend downward along the schedule unless they
    // already sit below the stop tolerance.
    for (std::size_t k = 2; k < result.ladder.size(); ++k) {
        const double d_prev = result.ladder[k - 1].sup_delta;
        const double d = result.ladder[k].sup_delta;
        if (d > std::max(1.2 * d_prev, cfg.tol_ladder)) {
            result.converged = false;
        }
    }
    return result;
}

ScalarField renormalize_max(const ScalarField& f) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : f.values()) m = std::max(m, v);
    std::vector<double> shifted = f.values();
    for (double& v : shifted) v -= m;
    return ScalarField(f.mesh(), std::move(shifted));
}

}  // namespace conefield
