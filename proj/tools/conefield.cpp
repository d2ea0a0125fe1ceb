// Command-line surface: fundamental-solution tables, disc solves, theorem
// verification batteries, and parameter sweeps, all driven by JSON configs.
//
// Exit codes: 0 success / all checks pass, 1 verification failure,
// 2 invalid input, 3 flagged non-convergence.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "conefield/analysis_verify.hpp"
#include "conefield/fundamental_radial.hpp"
#include "conefield/pipeline.hpp"
#include "conefield/run_config.hpp"

namespace fs = std::filesystem;
using namespace conefield;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNotConverged = 3;

struct CommonOverrides {
    double R = 0.0;
    double h = 0.0;
    double refine_factor = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir;

    void apply(RunConfig& cfg) const {
        if (R > 0.0) cfg.R = R;
        if (h > 0.0) cfg.h = h;
        if (refine_factor > 0.0) cfg.refine_factor = refine_factor;
        if (seed != 0) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
    }
};

int cmd_fundamental(int dim, double alpha, double rmax, int samples,
                    const std::string& out) {
    if (dim < 2 || alpha <= 0.0 || rmax <= 0.0 || samples < 1) {
        std::cerr << "fundamental: invalid range\n";
        return kExitBadInput;
    }
    const Dimension d(dim);
    std::ofstream os(out);
    if (!os) {
        std::cerr << "fundamental: cannot open " << out << "\n";
        return kExitBadInput;
    }
    os << "r,phi,grad_mag\n";
    for (int k = 0; k < samples; ++k) {
        const double r = samples == 1 ? 0.0 : rmax * k / (samples - 1);
        const double phi = phi_value(d, alpha, r);
        os << format_double(r) << ',' << format_double(phi) << ','
           << format_double(phi_grad_mag(d, alpha, r)) << '\n';
    }
    return kExitOk;
}

int cmd_solve(const RunConfig& cfg) {
    const SolveArtifacts art = run_solve(cfg);
    fs::create_directories(cfg.out_dir);
    write_field_csv((fs::path(cfg.out_dir) / "field.csv").string(), art);
    {
        std::ofstream os(fs::path(cfg.out_dir) / "result.json");
        os << solve_result_json(cfg, art).dump(2) << '\n';
    }
    {
        std::ofstream os(fs::path(cfg.out_dir) / "config.json");
        os << cfg.to_json().dump(2) << '\n';
    }
    const bool converged = art.radial || art.result->converged;
    if (!converged) {
        std::cerr << "solve: flagged non-convergence (best iterate written)\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
    const VerifyReport report = run_verify(cfg);
    const auto j = report.to_json();
    std::cout << j.dump(2) << '\n';
    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        std::ofstream os(fs::path(cfg.out_dir) / "report.json");
        os << j.dump(2) << '\n';
    }
    return report.all_pass() ? kExitOk : kExitVerifyFail;
}

std::string csv_quote(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n') c = ';';
    }
    return s;
}

int cmd_sweep(const RunConfig& base, const std::string& grid_path) {
    std::ifstream in(grid_path);
    if (!in) {
        std::cerr << "sweep: cannot open grid " << grid_path << "\n";
        return kExitBadInput;
    }
    nlohmann::json grid;
    in >> grid;
    if (!grid.is_object() || grid.empty()) {
        std::cerr << "sweep: grid must be a non-empty object of pointer -> values\n";
        return kExitBadInput;
    }
    std::vector<std::string> keys;
    std::vector<std::vector<nlohmann::json>> values;
    for (const auto& [key, arr] : grid.items()) {
        if (!arr.is_array() || arr.empty()) {
            std::cerr << "sweep: values for " << key << " must be a non-empty array\n";
            return kExitBadInput;
        }
        keys.push_back(key);
        values.push_back(std::vector<nlohmann::json>(arr.begin(), arr.end()));
    }

    fs::create_directories(base.out_dir);
    std::ofstream os(fs::path(base.out_dir) / "sweep.csv");
    for (const auto& k : keys) os << csv_quote(k) << ',';
    os << "energy,residue,farfield_coeff,lambda_max,oracle_err,converged,all_pass,error\n";

    std::vector<std::size_t> idx(keys.size(), 0);
    bool done = false;
    while (!done) {
        nlohmann::json doc = base.to_json();
        for (std::size_t k = 0; k < keys.size(); ++k) {
            doc[nlohmann::json::json_pointer(keys[k])] = values[k][idx[k]];
        }
        for (std::size_t k = 0; k < keys.size(); ++k) {
            os << values[k][idx[k]].dump() << ',';
        }
        try {
            const RunConfig cfg = RunConfig::from_json(doc);
            const SolveArtifacts art = run_solve(cfg);
            const VerifyReport report = run_verify(cfg);
            double energy = 0.0, residue_mean = 0.0, lambda_max = 0.0;
            bool converged = true;
            std::string oracle_err;
            if (!art.radial) {
                energy = art.result->energy;
                converged = art.result->converged;
                const auto radii = cfg.verify.flux_radii.empty()
                                       ? default_flux_radii(cfg)
                                       : cfg.verify.flux_radii;
                residue_mean = residue(art.result->field, radii).mean;
                for (const Pole& p : cfg.poles) {
                    const Vec2 xy{p.point[0], p.point[1]};
                    lambda_max = std::max(
                        lambda_max, interpolate(art.result->field, xy));
                }
                // single origin pole: sup distance to the pole-pinned radial
                // solution away from the tip
                if (cfg.poles.size() == 1 &&
                    std::hypot(cfg.poles[0].point[0], cfg.poles[0].point[1]) <
                        1e-12) {
                    const double alpha = cfg.poles[0].weight;
                    const ScalarField& f = art.result->field;
                    double err = 0.0;
                    for (std::size_t i = 0; i < f.values().size(); ++i) {
                        const double r = f.mesh().nodes[i].norm();
                        if (r < 0.1 * cfg.R) continue;
                        const double expect =
                            phi_2d(alpha, r) - phi_2d(alpha, cfg.R);
                        err = std::max(err, std::abs(f[i] - expect));
                    }
                    oracle_err = format_double(err);
                }
            } else {
                energy = std::numeric_limits<double>::quiet_NaN();
                residue_mean = -art.profile->alpha;
                lambda_max = art.profile->values.front();
            }
            double farfield = 0.0;
            if (report.meta.contains("farfield_coefficient")) {
                farfield = report.meta["farfield_coefficient"].get<double>();
            }
            os << format_double(energy) << ',' << format_double(residue_mean)
               << ',' << format_double(farfield) << ','
               << format_double(lambda_max) << ',' << oracle_err << ','
               << (converged ? 1 : 0) << ',' << (report.all_pass() ? 1 : 0)
               << ",\n";
        } catch (const std::exception& e) {
            os << ",,,,0,0," << csv_quote(e.what()) << '\n';
        }
        // odometer
        done = true;
        for (std::size_t k = keys.size(); k-- > 0;) {
            if (++idx[k] < values[k].size()) {
                done = false;
                break;
            }
            idx[k] = 0;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximal hypersurfaces with prescribed light-cone tips"};
    app.require_subcommand(1);

    // fundamental
    auto* fund = app.add_subcommand("fundamental",
                                    "tabulate the single-mass radial solution");
    int f_dim = 2;
    double f_alpha = 1.0, f_rmax = 10.0;
    int f_samples = 0;
    std::string f_out = "fundamental.csv";
    fund->add_option("--dim", f_dim, "ambient dimension N >= 2");
    fund->add_option("--alpha", f_alpha, "point mass");
    fund->add_option("--rmax", f_rmax, "largest radius");
    fund->add_option("--samples", f_samples, "number of rows");
    fund->add_option("--out", f_out, "output CSV path");

    // shared config-driven subcommands
    std::string config_path, grid_path;
    CommonOverrides overrides;
    auto add_config_opts = [&](CLI::App* sub, bool need_grid) {
        sub->add_option("--config", config_path, "JSON run configuration")
            ->required();
        sub->add_option("--R", overrides.R, "override domain radius");
        sub->add_option("--mesh-h", overrides.h, "override mesh spacing");
        sub->add_option("--refine-factor", overrides.refine_factor,
                        "override pole refinement factor");
        sub->add_option("--seed", overrides.seed, "override seed");
        sub->add_option("--out-dir", overrides.out_dir, "override output directory");
        if (need_grid) {
            sub->add_option("--grid", grid_path, "JSON grid of pointer -> values")
                ->required();
        }
    };
    auto* solve = app.add_subcommand("solve", "solve on a disc and export the field");
    add_config_opts(solve, false);
    auto* verify = app.add_subcommand("verify", "run the verification battery");
    add_config_opts(verify, false);
    auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
    add_config_opts(sweep, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fund->parsed()) {
            return cmd_fundamental(f_dim, f_alpha, f_rmax, f_samples, f_out);
        }
        RunConfig cfg = load_config(config_path);
        overrides.apply(cfg);
        if (solve->parsed()) return cmd_solve(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg, grid_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    }
    return kExitBadInput;
}
