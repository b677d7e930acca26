#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdcvis/quadrature.hpp"
#include "pdcvis/spectral.hpp"

namespace pdcvis_tool {

/// Raised for anything wrong with the configuration file; the message names
/// the offending field so a batch user can fix the config without reading
/// source. Mapped to exit code 2 by the driver.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    std::string parameter;  // one of: intensity, tau, alpha_plus_beta,
                            // filter_a_width, filter_b_width
    std::vector<double> values;
};

/// One batch run, loaded from a single JSON document with flat field names
/// mirroring the library types. An optional second filter pair lets the
/// sweep command overlay two filtering configurations in one plot.
struct RunConfig {
    pdcvis::SpectralModel model;
    pdcvis::FilterSpec filter_a;
    pdcvis::FilterSpec filter_b;
    std::optional<std::pair<pdcvis::FilterSpec, pdcvis::FilterSpec>> filters_alt;
    pdcvis::SetupConfig setup;
    pdcvis::QuadratureConfig quadrature;
    std::optional<SweepSpec> sweep;
    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};
    // Node cap for the discrete-oracle commands; raising it is a deliberate
    // opt-in to n^3 contraction cost on bigger grids.
    std::size_t oracle_max_grid = 128;
};

/// Parse and validate a config file. Throws ConfigError with the offending
/// field named; never returns a partially valid configuration.
RunConfig load_run_config(const std::string& path);

} // namespace pdcvis_tool
