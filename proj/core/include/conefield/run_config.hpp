#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conefield/core_types.hpp"
#include "conefield/variational_solver.hpp"

namespace conefield {

struct VerifySettings {
    std::vector<double> flux_radii;       // empty -> chosen from the geometry
    double annulus_lo = 0.0;              // 0 -> chosen from the geometry
    double annulus_hi = 0.0;
    double segment_threshold = 0.98;
    double slack = 0.02;
};

/// One parseable document per run. Serialization emits every field so that
/// parse(serialize(cfg)) is the identity.
struct RunConfig {
    std::string mode = "solve";  // fundamental | solve | verify | sweep
    int dim = 2;
    double R = 4.0;
    double h = 0.0625;
    double refine_factor = 4.0;
    double R0 = 0.0;  // 0 -> derived from the poles
    std::vector<Pole> poles;
    SolverConfig solver;
    VerifySettings verify;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::ordered_json to_json() const;

    double effective_r0() const;
    PoleConfig pole_config() const;

    friend bool operator==(const RunConfig& a, const RunConfig& b) {
        return a.to_json() == b.to_json();
    }
};

RunConfig load_config(const std::string& path);

std::string format_double(double v);  // 17 significant digits

}  // namespace conefield
