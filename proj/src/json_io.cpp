#include "quintic/json_io.hpp"

#include <json.hpp>

#include "quintic/errors.hpp"

namespace quintic {

namespace {

using nlohmann::json;

json parse(const std::string& text, const char* what) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded())
        throw InvalidInput(std::string(what) + ": malformed JSON");
    return doc;
}

void reject_unknown(const json& doc, std::initializer_list<const char*> known,
                    const char* what) {
    if (!doc.is_object()) throw InvalidInput(std::string(what) + ": expected an object");
    for (const auto& [key, value] : doc.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw InvalidInput(std::string(what) + ": unknown field \"" + key + "\"");
    }
}

double require_number(const json& doc, const char* field, const char* what) {
    if (!doc.contains(field))
        throw InvalidInput(std::string(what) + ": missing field \"" + field + "\"");
    const json& v = doc.at(field);
    if (!v.is_number())
        throw InvalidInput(std::string(what) + ": field \"" + field + "\" must be a number");
    return v.get<double>();
}

std::vector<double> require_array(const json& doc, const char* field, const char* what) {
    if (!doc.contains(field))
        throw InvalidInput(std::string(what) + ": missing field \"" + field + "\"");
    const json& v = doc.at(field);
    if (!v.is_array())
        throw InvalidInput(std::string(what) + ": field \"" + field + "\" must be an array");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number())
            throw InvalidInput(std::string(what) + ": field \"" + field +
                               "\" must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace

std::string model_to_json(const ModelDocument& doc) {
    json out;
    out["lambda_x"] = doc.params.lambda_x;
    out["lambda_y"] = doc.params.lambda_y;
    out["theta"] = doc.params.theta;
    out["rho"] = doc.params.rho;
    out["alpha"] = doc.params.alpha;
    out["xi0_knots"] = doc.curve.knots();
    out["xi0_values"] = doc.curve.values();
    return out.dump(2) + "\n";
}

ModelDocument model_from_json(const std::string& text) {
    const char* what = "model";
    json doc = parse(text, what);
    reject_unknown(doc,
                   {"lambda_x", "lambda_y", "theta", "rho", "alpha", "xi0_knots",
                    "xi0_values"},
                   what);
    const double lx = require_number(doc, "lambda_x", what);
    const double ly = require_number(doc, "lambda_y", what);
    const double th = require_number(doc, "theta", what);
    const double rho = require_number(doc, "rho", what);
    const std::vector<double> a = require_array(doc, "alpha", what);

    ModelDocument out;
    if (a.size() == 6) {
        std::array<double, 6> alpha;
        std::copy(a.begin(), a.end(), alpha.begin());
        out.params = make_params(lx, ly, th, rho, alpha);
    } else if (a.size() == 5) {
        std::array<double, 5> alpha;
        std::copy(a.begin(), a.end(), alpha.begin());
        out.params = make_params(lx, ly, th, rho, alpha);
    } else {
        throw InvalidInput("model: \"alpha\" must have 5 or 6 entries");
    }

    const std::vector<double> knots = require_array(doc, "xi0_knots", what);
    const std::vector<double> values = require_array(doc, "xi0_values", what);
    out.curve = ForwardVarianceCurve(knots, values);
    return out;
}

std::string mc_config_to_json(const McConfig& config) {
    json out;
    out["n_paths"] = config.n_paths;
    out["steps_per_year"] = config.steps_per_year;
    out["seed"] = config.seed;
    out["antithetic"] = config.antithetic;
    out["estimator"] = config.estimator == Estimator::Conditional ? "conditional" : "plain";
    return out.dump(2) + "\n";
}

McConfig mc_config_from_json(const std::string& text) {
    const char* what = "mc_config";
    json doc = parse(text, what);
    reject_unknown(doc, {"n_paths", "steps_per_year", "seed", "antithetic", "estimator"},
                   what);
    McConfig config;
    if (doc.contains("n_paths")) {
        if (!doc["n_paths"].is_number_unsigned())
            throw InvalidInput("mc_config: \"n_paths\" must be a nonnegative integer");
        config.n_paths = doc["n_paths"].get<std::int64_t>();
    }
    if (doc.contains("steps_per_year")) {
        if (!doc["steps_per_year"].is_number_integer())
            throw InvalidInput("mc_config: \"steps_per_year\" must be an integer");
        config.steps_per_year = doc["steps_per_year"].get<int>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned())
            throw InvalidInput("mc_config: \"seed\" must be a nonnegative integer");
        config.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("antithetic")) {
        if (!doc["antithetic"].is_boolean())
            throw InvalidInput("mc_config: \"antithetic\" must be a boolean");
        config.antithetic = doc["antithetic"].get<bool>();
    }
    if (doc.contains("estimator")) {
        const std::string name = doc["estimator"].is_string()
                                     ? doc["estimator"].get<std::string>()
                                     : std::string();
        if (name == "conditional")
            config.estimator = Estimator::Conditional;
        else if (name == "plain")
            config.estimator = Estimator::Plain;
        else
            throw InvalidInput(
                "mc_config: \"estimator\" must be \"conditional\" or \"plain\"");
    }
    return config;
}

std::string vix_polynomial_to_json(const VixPolynomial& poly) {
    json out;
    out["t"] = poly.t;
    out["delta"] = poly.delta;
    out["scale"] = poly.scale;
    json terms = json::array();
    for (int l = 0; l <= 10; ++l)
        for (int m = 0; m <= l; ++m)
            terms.push_back({{"m", m},
                             {"l", l},
                             {"coefficient", poly.beta[static_cast<std::size_t>(
                                 beta_index(m, l))]}});
    out["beta"] = std::move(terms);
    out["covariance"] = {{"t", poly.covariance.t},
                         {"xx", poly.covariance.xx},
                         {"xy", poly.covariance.xy},
                         {"yy", poly.covariance.yy}};
    return out.dump(2) + "\n";
}

std::string calibration_result_to_json(const CalibrationResult& result) {
    json out;
    out["model"] = json::parse(model_to_json({result.params, result.curve}));
    out["loss"] = result.loss;
    out["blocks"] = {{"spx", result.blocks.spx},
                     {"vix", result.blocks.vix},
                     {"futures", result.blocks.futures},
                     {"ssr", result.blocks.ssr}};
    out["n_evals"] = result.n_evals;
    out["restarts_used"] = result.restarts_used;
    out["seed"] = result.seed;
    out["trace"] = result.trace;
    if (!result.ssr_diag.empty()) {
        json diag = json::array();
        for (const SsrPoint& p : result.ssr_diag)
            diag.push_back({{"maturity", p.maturity},
                            {"ssr", p.ssr},
                            {"stderr", p.se},
                            {"atm_iv", p.atm_iv},
                            {"atm_skew", p.atm_skew}});
        out["ssr"] = std::move(diag);
    }
    return out.dump(2) + "\n";
}

std::pair<GridKind, int> parse_grid_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw InvalidInput("grid spec must look like \"gh:256\" or \"quantizer:500\"");
    const std::string kind = spec.substr(0, colon);
    int size = 0;
    try {
        std::size_t used = 0;
        size = std::stoi(spec.substr(colon + 1), &used);
        if (used != spec.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw InvalidInput("grid spec \"" + spec + "\": size must be an integer");
    }
    if (size <= 0) throw InvalidInput("grid spec \"" + spec + "\": size must be positive");
    if (kind == "gh") return {GridKind::GaussHermite, size};
    if (kind == "quantizer") return {GridKind::Quantizer, size};
    throw InvalidInput("grid spec \"" + spec + "\": kind must be gh or quantizer");
}

CalibrationSettings calibration_settings_from_json(const std::string& text) {
    const char* what = "calibration settings";
    CalibrationSettings out;
    if (text.empty()) return out;
    json doc = parse(text, what);
    reject_unknown(doc,
                   {"weights", "ssr_interval", "mask", "budget", "restarts",
                    "initial_step", "mc", "vix_grid", "grid_data_dir", "vix_quad_nodes",
                    "ssr_penalty", "xi0"},
                   what);

    if (doc.contains("weights")) {
        const json& w = doc["weights"];
        reject_unknown(w, {"spx", "vix", "futures", "ssr"}, "calibration weights");
        if (w.contains("spx")) out.weights.spx = require_number(w, "spx", what);
        if (w.contains("vix")) out.weights.vix = require_number(w, "vix", what);
        if (w.contains("futures")) out.weights.futures = require_number(w, "futures", what);
        if (w.contains("ssr")) out.weights.ssr = require_number(w, "ssr", what);
    }
    if (doc.contains("ssr_interval")) {
        const std::vector<double> iv = require_array(doc, "ssr_interval", what);
        if (iv.size() != 2)
            throw InvalidInput("calibration settings: \"ssr_interval\" must be [lo, hi]");
        out.ssr_lo = iv[0];
        out.ssr_hi = iv[1];
    }
    if (doc.contains("mask")) {
        const json& m = doc["mask"];
        reject_unknown(m, {"lambda_x", "lambda_y", "theta", "rho", "alpha"},
                       "calibration mask");
        auto get_bool = [&](const char* field, bool fallback) {
            if (!m.contains(field)) return fallback;
            if (!m[field].is_boolean())
                throw InvalidInput(std::string("calibration mask: \"") + field +
                                   "\" must be a boolean");
            return m[field].get<bool>();
        };
        out.config.mask.lambda_x = get_bool("lambda_x", true);
        out.config.mask.lambda_y = get_bool("lambda_y", true);
        out.config.mask.theta = get_bool("theta", true);
        out.config.mask.rho = get_bool("rho", true);
        if (m.contains("alpha")) {
            const json& a = m["alpha"];
            if (!a.is_array() || a.size() != 5)
                throw InvalidInput(
                    "calibration mask: \"alpha\" must be an array of 5 booleans");
            for (std::size_t k = 0; k < 5; ++k) {
                if (!a[k].is_boolean())
                    throw InvalidInput(
                        "calibration mask: \"alpha\" must be an array of 5 booleans");
                out.config.mask.alpha[k] = a[k].get<bool>();
            }
        }
    }
    if (doc.contains("budget")) {
        if (!doc["budget"].is_number_integer())
            throw InvalidInput("calibration settings: \"budget\" must be an integer");
        out.config.budget = doc["budget"].get<int>();
    }
    if (doc.contains("restarts")) {
        if (!doc["restarts"].is_number_integer())
            throw InvalidInput("calibration settings: \"restarts\" must be an integer");
        out.config.restarts = doc["restarts"].get<int>();
    }
    if (doc.contains("initial_step"))
        out.config.initial_step = require_number(doc, "initial_step", what);
    if (doc.contains("mc")) out.config.mc = mc_config_from_json(doc["mc"].dump());
    if (doc.contains("vix_grid")) {
        if (!doc["vix_grid"].is_string())
            throw InvalidInput(
                "calibration settings: \"vix_grid\" must be a string like \"gh:256\"");
        const auto [kind, size] = parse_grid_spec(doc["vix_grid"].get<std::string>());
        out.config.vix_grid_kind = kind;
        out.config.vix_grid_size = size;
    }
    if (doc.contains("grid_data_dir")) {
        if (!doc["grid_data_dir"].is_string())
            throw InvalidInput("calibration settings: \"grid_data_dir\" must be a string");
        out.config.grid_data_dir = doc["grid_data_dir"].get<std::string>();
    }
    if (doc.contains("vix_quad_nodes")) {
        if (!doc["vix_quad_nodes"].is_number_integer())
            throw InvalidInput(
                "calibration settings: \"vix_quad_nodes\" must be an integer");
        out.config.vix_quad_nodes = doc["vix_quad_nodes"].get<int>();
    }
    if (doc.contains("ssr_penalty")) {
        const json& s = doc["ssr_penalty"];
        reject_unknown(s, {"enabled", "maturities", "epsilon", "mc"},
                       "calibration ssr_penalty");
        if (s.contains("enabled")) {
            if (!s["enabled"].is_boolean())
                throw InvalidInput(
                    "calibration ssr_penalty: \"enabled\" must be a boolean");
            out.config.ssr.enabled = s["enabled"].get<bool>();
        } else {
            out.config.ssr.enabled = true;  // presence implies intent
        }
        if (s.contains("maturities"))
            out.config.ssr.maturities = require_array(s, "maturities", what);
        if (s.contains("epsilon"))
            out.config.ssr.epsilon = require_number(s, "epsilon", what);
        if (s.contains("mc")) out.config.ssr.mc = mc_config_from_json(s["mc"].dump());
    }
    if (doc.contains("xi0")) {
        const json& x = doc["xi0"];
        if (x.is_string()) {
            const std::string mode = x.get<std::string>();
            if (mode == "fixed")
                out.config.xi0_mode = Xi0Mode::Fixed;
            else if (mode == "varswaps")
                out.config.xi0_mode = Xi0Mode::FromVarswaps;
            else if (mode == "free")
                out.config.xi0_mode = Xi0Mode::FreeLevels;
            else
                throw InvalidInput(
                    "calibration settings: \"xi0\" must be \"fixed\", \"varswaps\", "
                    "\"free\", or {\"free_levels\": [knots]}");
        } else if (x.is_object()) {
            reject_unknown(x, {"free_levels"}, "calibration xi0");
            out.config.xi0_mode = Xi0Mode::FreeLevels;
            out.config.xi0_knots = require_array(x, "free_levels", what);
        } else {
            throw InvalidInput("calibration settings: \"xi0\" must be a string or object");
        }
    }
    return out;
}

}  // namespace quintic
