#include "run_config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "units.hpp"

namespace pdcvis_tool {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config error: " + field + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& section,
                         const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            fail(section.empty() ? it.key() : section + "." + it.key(),
                 "unrecognized field");
}

double require_number(const json& obj, const std::string& section, const char* key) {
    const std::string field = section + "." + key;
    if (!obj.contains(key)) fail(field, "missing required field");
    if (!obj[key].is_number()) fail(field, "must be a number");
    return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& section, const char* key,
                 double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(section + "." + key, "must be a number");
    return obj[key].get<double>();
}

pdcvis::FilterSpec parse_filter(const json& obj, const std::string& section) {
    reject_unknown_keys(obj, section,
                        {"shape", "width", "center_offset", "width_nm", "lambda_nm"});
    std::string shape = "none";
    if (obj.contains("shape")) {
        if (!obj["shape"].is_string()) fail(section + ".shape", "must be a string");
        shape = obj["shape"].get<std::string>();
    }
    pdcvis::FilterShape fs;
    if (shape == "none")
        fs = pdcvis::FilterShape::none;
    else if (shape == "rectangular")
        fs = pdcvis::FilterShape::rectangular;
    else if (shape == "gaussian")
        fs = pdcvis::FilterShape::gaussian;
    else
        fail(section + ".shape", "must be none, rectangular or gaussian (got '" +
                                     shape + "')");
    if (fs == pdcvis::FilterShape::none) {
        if (obj.contains("width") || obj.contains("width_nm"))
            fail(section + ".width", "a width makes no sense for shape 'none'");
        return pdcvis::FilterSpec::none_filter();
    }

    // Width either directly in rad/ps or as a datasheet nm FWHM at a carrier.
    double width = 0.0;
    const bool direct = obj.contains("width");
    const bool in_nm = obj.contains("width_nm");
    if (direct == in_nm)
        fail(section, "give exactly one of 'width' (rad/ps) or 'width_nm' + 'lambda_nm'");
    if (direct) {
        width = require_number(obj, section, "width");
        if (obj.contains("lambda_nm"))
            fail(section + ".lambda_nm", "only meaningful together with width_nm");
    } else {
        if (!obj.contains("lambda_nm"))
            fail(section + ".lambda_nm", "required when the width is given in nm");
        try {
            width = nm_fwhm_to_rad_per_ps(require_number(obj, section, "width_nm"),
                                          require_number(obj, section, "lambda_nm"));
        } catch (const std::invalid_argument& e) {
            fail(section, e.what());
        }
    }
    const double center = number_or(obj, section, "center_offset", 0.0);
    try {
        return pdcvis::FilterSpec(fs, width, center);
    } catch (const std::invalid_argument& e) {
        fail(section, e.what());
    }
}

pdcvis::SpectralModel parse_model(const json& obj) {
    reject_unknown_keys(obj, "model", {"delta_p", "delta_a", "delta_b", "shape"});
    std::string shape = "gaussian";
    if (obj.contains("shape")) {
        if (!obj["shape"].is_string()) fail("model.shape", "must be a string");
        shape = obj["shape"].get<std::string>();
    }
    pdcvis::ModelShape ms;
    if (shape == "gaussian")
        ms = pdcvis::ModelShape::gaussian;
    else if (shape == "separable_gaussian")
        ms = pdcvis::ModelShape::separable_gaussian;
    else
        fail("model.shape", "must be gaussian or separable_gaussian (got '" + shape + "')");
    try {
        return pdcvis::SpectralModel(require_number(obj, "model", "delta_p"),
                                     require_number(obj, "model", "delta_a"),
                                     require_number(obj, "model", "delta_b"), ms);
    } catch (const std::invalid_argument& e) {
        fail("model", e.what());
    }
}

pdcvis::SetupConfig parse_setup(const json& obj) {
    reject_unknown_keys(
        obj, "setup", {"intensity", "tau", "delta_t", "alpha", "beta", "eta_product"});
    try {
        return pdcvis::SetupConfig(require_number(obj, "setup", "intensity"),
                                   require_number(obj, "setup", "tau"),
                                   require_number(obj, "setup", "delta_t"),
                                   number_or(obj, "setup", "alpha", 0.0),
                                   number_or(obj, "setup", "beta", 0.0),
                                   number_or(obj, "setup", "eta_product", 1.0));
    } catch (const std::invalid_argument& e) {
        fail("setup", e.what());
    }
}

pdcvis::QuadratureConfig parse_quadrature(const json& obj) {
    reject_unknown_keys(obj, "quadrature",
                        {"nodes_per_axis", "range_sigmas", "rule", "j4_nodes_per_axis"});
    pdcvis::QuadratureConfig qc;
    if (obj.contains("nodes_per_axis")) {
        if (!obj["nodes_per_axis"].is_number_integer())
            fail("quadrature.nodes_per_axis", "must be an integer");
        qc.nodes_per_axis = obj["nodes_per_axis"].get<int>();
    }
    qc.range_sigmas = number_or(obj, "quadrature", "range_sigmas", qc.range_sigmas);
    if (obj.contains("j4_nodes_per_axis")) {
        if (!obj["j4_nodes_per_axis"].is_number_integer())
            fail("quadrature.j4_nodes_per_axis", "must be an integer");
        qc.j4_nodes_per_axis = obj["j4_nodes_per_axis"].get<int>();
    }
    if (obj.contains("rule")) {
        if (!obj["rule"].is_string()) fail("quadrature.rule", "must be a string");
        const std::string rule = obj["rule"].get<std::string>();
        if (rule == "gauss_legendre")
            qc.rule = pdcvis::QuadratureRule::gauss_legendre;
        else if (rule == "trapezoid")
            qc.rule = pdcvis::QuadratureRule::trapezoid;
        else
            fail("quadrature.rule", "must be gauss_legendre or trapezoid (got '" +
                                        rule + "')");
    }
    try {
        qc.validate();
    } catch (const std::invalid_argument& e) {
        fail("quadrature", e.what());
    }
    return qc;
}

SweepSpec parse_sweep(const json& obj) {
    reject_unknown_keys(obj, "sweep", {"parameter", "values"});
    SweepSpec s;
    if (!obj.contains("parameter") || !obj["parameter"].is_string())
        fail("sweep.parameter", "missing or not a string");
    s.parameter = obj["parameter"].get<std::string>();
    static const std::set<std::string> kKnown = {
        "intensity", "tau", "alpha_plus_beta", "filter_a_width", "filter_b_width"};
    if (!kKnown.count(s.parameter))
        fail("sweep.parameter",
             "must be one of intensity, tau, alpha_plus_beta, filter_a_width, "
             "filter_b_width (got '" +
                 s.parameter + "')");
    if (!obj.contains("values") || !obj["values"].is_array())
        fail("sweep.values", "missing or not an array");
    for (const auto& v : obj["values"]) {
        if (!v.is_number()) fail("sweep.values", "every entry must be a number");
        s.values.push_back(v.get<double>());
    }
    if (s.values.empty()) fail("sweep.values", "must be non-empty");
    return s;
}

} // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config error: " + path + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config error: top level must be an object");
    reject_unknown_keys(doc, "",
                        {"model", "filter_a", "filter_b", "filter_a_alt", "filter_b_alt",
                         "setup", "quadrature", "sweep", "outputs", "oracle_max_grid"});
    if (!doc.contains("model")) fail("model", "missing required section");
    if (!doc.contains("setup")) fail("setup", "missing required section");

    RunConfig cfg{
        parse_model(doc["model"]),
        doc.contains("filter_a") ? parse_filter(doc["filter_a"], "filter_a")
                                 : pdcvis::FilterSpec::none_filter(),
        doc.contains("filter_b") ? parse_filter(doc["filter_b"], "filter_b")
                                 : pdcvis::FilterSpec::none_filter(),
        std::nullopt,
        parse_setup(doc["setup"]),
        doc.contains("quadrature") ? parse_quadrature(doc["quadrature"])
                                   : pdcvis::QuadratureConfig{},
        std::nullopt,
        "out",
        {"csv", "json"},
        128,
    };

    const bool has_alt_a = doc.contains("filter_a_alt");
    const bool has_alt_b = doc.contains("filter_b_alt");
    if (has_alt_a != has_alt_b)
        fail(has_alt_a ? "filter_b_alt" : "filter_a_alt",
             "the alternate filter pair needs both arms");
    if (has_alt_a)
        cfg.filters_alt = {parse_filter(doc["filter_a_alt"], "filter_a_alt"),
                           parse_filter(doc["filter_b_alt"], "filter_b_alt")};

    if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc["sweep"]);

    if (doc.contains("outputs")) {
        const json& out = doc["outputs"];
        reject_unknown_keys(out, "outputs", {"directory", "formats"});
        if (out.contains("directory")) {
            if (!out["directory"].is_string())
                fail("outputs.directory", "must be a string");
            cfg.out_dir = out["directory"].get<std::string>();
            if (cfg.out_dir.empty()) fail("outputs.directory", "must be non-empty");
        }
        if (out.contains("formats")) {
            if (!out["formats"].is_array()) fail("outputs.formats", "must be an array");
            cfg.formats.clear();
            for (const auto& f : out["formats"]) {
                if (!f.is_string()) fail("outputs.formats", "entries must be strings");
                const std::string name = f.get<std::string>();
                if (name != "csv" && name != "json" && name != "svg")
                    fail("outputs.formats", "must be a subset of csv, json, svg (got '" +
                                                name + "')");
                cfg.formats.push_back(name);
            }
        }
    }

    if (doc.contains("oracle_max_grid")) {
        if (!doc["oracle_max_grid"].is_number_integer() ||
            doc["oracle_max_grid"].get<long long>() < 2)
            fail("oracle_max_grid", "must be an integer >= 2");
        cfg.oracle_max_grid = doc["oracle_max_grid"].get<std::size_t>();
    }
    return cfg;
}

} // namespace pdcvis_tool
