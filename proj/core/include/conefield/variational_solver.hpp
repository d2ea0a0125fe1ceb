#pragma once

#include <vector>

#include "conefield/mesh_disc.hpp"
#include "conefield/source_mollifier.hpp"

namespace conefield {

struct SolverConfig {
    /// Gradient-cap continuation: cells are kept at |grad w| <= 1 - eps, with
    /// eps walked down this schedule on the cold-started level. Warm-started
    /// ladder levels run at the final cap only.
    std::vector<double> eps_cap = {1e-1, 1e-2, 1e-3, 1e-4};
    int max_newton = 80;
    double tol_residual = 1e-8;
    double tol_energy = 1e-13;
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 50;
    std::vector<int> ladder_n = {4, 8, 16, 32, 64};
    double tol_ladder = 5e-4;
    /// Load the poles directly onto their nodes instead of through the
    /// mollified source (cross-check path).
    bool dirac_source = false;
};

struct LadderLevel {
    int n = 0;
    double sup_delta = 0.0;
    std::vector<double> tip_grad;  // per pole: max |grad| over adjacent cells
};

struct SolveResult {
    ScalarField field;
    double energy = 0.0;
    double max_cell_grad = 0.0;
    int newton_iterations = 0;
    bool converged = false;
    std::vector<double> energy_history;
    std::vector<LadderLevel> ladder;
};

double energy(const ScalarField& w, const SourceField& source);
double energy(const ScalarField& w, const PoleConfig& poles);

/// Assembled residual of the discrete weak form against every nodal hat
/// function (boundary nodes included; the solver masks them).
std::vector<double> energy_gradient(const ScalarField& w, const SourceField& source);
std::vector<double> energy_gradient(const ScalarField& w, const PoleConfig& poles);

SolveResult solve_dirichlet(const DiscMesh& mesh, const SourceField& source,
                            const SolverConfig& cfg);

/// Mollifier ladder: solve along cfg.ladder_n with warm starts, stopping once
/// the sup-norm change between consecutive levels drops below tol_ladder.
/// Requires R > 2 R0 and a mesh with a node at every pole.
SolveResult solve_dirac_ladder(const DiscMesh& mesh, const PoleConfig& poles,
                               const SolverConfig& cfg);

/// Field minus its maximum; the result has max 0.
ScalarField renormalize_max(const ScalarField& f);

/// Max |grad| over the cells incident to the node nearest to each pole.
std::vector<double> pole_tip_gradients(const ScalarField& f, const PoleConfig& poles);

}  // namespace conefield
