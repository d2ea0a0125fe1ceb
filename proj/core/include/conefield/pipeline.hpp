#pragma once

#include <memory>
#include <optional>
#include <string>

#include "conefield/analysis_verify.hpp"
#include "conefield/run_config.hpp"

namespace conefield {

/// Everything a solve run produces. For dim == 2 the mesh/result pair is
/// set; for dim >= 3 the run reduces to the radial path and fills `profile`.
struct SolveArtifacts {
    std::shared_ptr<const DiscMesh> mesh;
    std::optional<SolveResult> result;
    std::optional<RadialProfile> profile;
    std::optional<PoleConfig> poles;
    bool radial = false;
};

SolveArtifacts run_solve(const RunConfig& cfg);

/// Full battery of checks applicable to the configuration.
VerifyReport run_verify(const RunConfig& cfg);

/// Default ring radii / annulus in the gap between the pole hull and the
/// boundary, used when the config leaves them unset.
std::vector<double> default_flux_radii(const RunConfig& cfg);
std::pair<double, double> default_annulus(const RunConfig& cfg);

void write_field_csv(const std::string& path, const SolveArtifacts& art);
nlohmann::ordered_json solve_result_json(const RunConfig& cfg,
                                         const SolveArtifacts& art);

}  // namespace conefield
