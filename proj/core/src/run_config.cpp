#include "conefield/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace conefield {

namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig cfg;
    read_if(j, "mode", cfg.mode);
    read_if(j, "dim", cfg.dim);
    read_if(j, "R", cfg.R);
    read_if(j, "h", cfg.h);
    read_if(j, "refine_factor", cfg.refine_factor);
    read_if(j, "R0", cfg.R0);
    read_if(j, "seed", cfg.seed);
    read_if(j, "out_dir", cfg.out_dir);
    if (j.contains("poles")) {
        for (const auto& p : j.at("poles")) {
            Pole pole;
            pole.point = p.at("point").get<std::vector<double>>();
            pole.weight = p.at("weight").get<double>();
            cfg.poles.push_back(std::move(pole));
        }
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        read_if(s, "eps_cap", cfg.solver.eps_cap);
        read_if(s, "max_newton", cfg.solver.max_newton);
        read_if(s, "tol_residual", cfg.solver.tol_residual);
        read_if(s, "tol_energy", cfg.solver.tol_energy);
        read_if(s, "ladder_n", cfg.solver.ladder_n);
        read_if(s, "tol_ladder", cfg.solver.tol_ladder);
        read_if(s, "dirac_source", cfg.solver.dirac_source);
    }
    if (j.contains("verify")) {
        const auto& v = j.at("verify");
        read_if(v, "flux_radii", cfg.verify.flux_radii);
        read_if(v, "annulus_lo", cfg.verify.annulus_lo);
        read_if(v, "annulus_hi", cfg.verify.annulus_hi);
        read_if(v, "segment_threshold", cfg.verify.segment_threshold);
        read_if(v, "slack", cfg.verify.slack);
    }
    return cfg;
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["mode"] = mode;
    j["dim"] = dim;
    j["R"] = R;
    j["h"] = h;
    j["refine_factor"] = refine_factor;
    j["R0"] = R0;
    j["poles"] = nlohmann::ordered_json::array();
    for (const Pole& p : poles) {
        nlohmann::ordered_json e;
        e["point"] = p.point;
        e["weight"] = p.weight;
        j["poles"].push_back(e);
    }
    j["solver"] = {{"eps_cap", solver.eps_cap},
                   {"max_newton", solver.max_newton},
                   {"tol_residual", solver.tol_residual},
                   {"tol_energy", solver.tol_energy},
                   {"ladder_n", solver.ladder_n},
                   {"tol_ladder", solver.tol_ladder},
                   {"dirac_source", solver.dirac_source}};
    j["verify"] = {{"flux_radii", verify.flux_radii},
                   {"annulus_lo", verify.annulus_lo},
                   {"annulus_hi", verify.annulus_hi},
                   {"segment_threshold", verify.segment_threshold},
                   {"slack", verify.slack}};
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    return j;
}

double RunConfig::effective_r0() const {
    if (R0 > 0.0) return R0;
    double max_r = 0.0;
    for (const Pole& p : poles) {
        double s = 0.0;
        for (double v : p.point) s += v * v;
        max_r = std::max(max_r, std::sqrt(s));
    }
    return std::max(1.0, 2.0 * max_r + 0.5);
}

PoleConfig RunConfig::pole_config() const {
    return PoleConfig(Dimension(dim), poles, effective_r0());
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    nlohmann::json j;
    in >> j;
    return RunConfig::from_json(j);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace conefield
