#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracmc/evolution.hpp"
#include "fracmc/geometry.hpp"
#include "fracmc/phase_transition.hpp"
#include "fracmc/potential.hpp"
#include "fracmc/quadrature.hpp"

namespace fracmc {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { phi, constants, identity_check, abar_convergence, kappa, evolve };

ExperimentKind experiment_kind_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

// Sample points: "list" (explicit), "boundary" (evenly spread on the
// surface), "random" (seeded, offset along the normal by up to
// band * min(rho, 1)).
struct PointRule {
    std::string rule = "boundary";
    int count = 4;
    double band = 0.5;
    std::vector<Point> list;
};

struct EvolveSettings {
    int nodes = 256;
    double half_width = 3.0;
    double t_end = 0.03;
    int snapshot_every = 0;  // steps between node-value snapshots, 0 = none
    int front_every = 10;    // steps between front-series rows
    double cfl = 0.5;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    ExperimentKind kind = ExperimentKind::abar_convergence;
    SurfaceKind surface_kind = SurfaceKind::sphere;
    SurfaceParams surface;
    double s = 0.5;
    PotentialKind potential = PotentialKind::cosine;
    SolverOptions solver;
    std::vector<double> eps{0.2, 0.1, 0.05};
    PointRule points;
    QuadratureSpec quad;
    EvolveSettings evolve;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
};

nlohmann::ordered_json to_json(const ExperimentConfig& cfg);
// Missing fields take their defaults; unknown keys and wrong types throw a
// validation Error.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig read_config(const std::string& path);

// Kind-specific checks; throws a validation Error.
void validate(const ExperimentConfig& cfg);

// Compact dump of the config without the output directory.
std::string canonical_string(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(const std::string& text);
// "<kind>-<16 hex digits of the canonical hash>".
std::string output_stem(const ExperimentConfig& cfg);

// Points prescribed by the rule. Random points come from one mt19937_64
// seeded with cfg.seed.
std::vector<Point> sample_points(const ExperimentConfig& cfg, const Surface& surface);

}  // namespace fracmc
