#pragma once

// JSON (de)serialization for the documented file formats.  Field names here
// are the external contract; renaming one breaks user configs.

#include <string>

#include "quintic/calibration.hpp"
#include "quintic/mc.hpp"
#include "quintic/model.hpp"
#include "quintic/vix.hpp"

namespace quintic {

// {"lambda_x": .., "lambda_y": .., "theta": .., "rho": ..,
//  "alpha": [a0..a5], "xi0_knots": [..], "xi0_values": [..]}
// Unknown fields are rejected.  "alpha" also accepts 5 entries (a5 = 1).
struct ModelDocument {
    ModelParams params;
    ForwardVarianceCurve curve = ForwardVarianceCurve::flat(0.04);
};

std::string model_to_json(const ModelDocument& doc);
ModelDocument model_from_json(const std::string& text);

// {"n_paths": .., "steps_per_year": .., "seed": .., "antithetic": ..,
//  "estimator": "conditional"|"plain"} -- all fields optional, defaults from
// McConfig.  Unknown fields are rejected.
std::string mc_config_to_json(const McConfig& config);
McConfig mc_config_from_json(const std::string& text);

// Full coefficient table with the (m, l) indexing spelled out per entry, so
// the file is self-describing without knowing the flattened layout.
std::string vix_polynomial_to_json(const VixPolynomial& poly);

std::string calibration_result_to_json(const CalibrationResult& result);

// "gh:256" or "quantizer:500" -> (kind, size).
std::pair<GridKind, int> parse_grid_spec(const std::string& spec);

// Everything about a calibration run that is not the quote data:
// {"weights": {"spx","vix","futures","ssr"}, "ssr_interval": [lo, hi],
//  "mask": {"lambda_x","lambda_y","theta","rho","alpha": [5 bools]},
//  "budget", "restarts", "initial_step", "mc": {...},
//  "vix_grid": "gh:256", "grid_data_dir", "vix_quad_nodes",
//  "ssr_penalty": {"enabled","maturities","epsilon","mc"},
//  "xi0": "fixed" | "varswaps" | {"free_levels": [knots...]}}
// Every field optional; unknown fields rejected.
struct CalibrationSettings {
    CalibrationConfig config;
    BlockWeights weights;
    double ssr_lo = 0.9;
    double ssr_hi = 2.0;
};

CalibrationSettings calibration_settings_from_json(const std::string& text);

}  // namespace quintic
