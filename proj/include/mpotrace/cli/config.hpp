#pragma once

#include "mpotrace/lanczos.hpp"
#include "mpotrace/models.hpp"
#include "mpotrace/thermal.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpotrace::cli {

/// Invalid or inconsistent run configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Output { s, c, F_T, D_T, Czz };

Output parse_output(const std::string& name);
std::string to_string(Output o);

/*! One experiment manifest. A sweep runs every (L, parameter) combination.
 *
 * YAML layout (all sections optional except `model`):
 *
 *   model:       {family: lmg, L: [12, 16], h: [0.2, 1.2]}   # ising: J, g
 *   temperature: {min: 0.1, max: 1.0, step: 0.1, delta: 0.1}
 *   lanczos:     {kmax: 70, dmax: 60, breakdown_tol: 1e-12,
 *                 reorthogonalize: false, stop_tol: 1e-10}
 *   outputs:     [s, c, F_T, D_T, Czz]
 *   correlators: {pairs: [[5, 6], [5, 7]], symmetry: none}   # or spin_flip
 *   cache: run-cache
 *   out: results.csv
 *   workers: 2
 */
struct RunConfig {
    models::Family family = models::Family::ising;
    std::vector<std::size_t> lengths;
    std::vector<double> parameters; // g for Ising, h for LMG
    double coupling_j = 1.0;        // Ising J

    double t_min = 0.1;
    double t_max = 1.0;
    double t_step = 0.1;
    std::optional<double> delta_t; // defaults to t_step

    std::size_t k_max = 70;
    std::size_t d_max = 60;
    double breakdown_tolerance = 1e-12;
    bool reorthogonalize = false;
    std::optional<double> stop_tolerance; // partition-function probe at the largest beta

    std::set<Output> outputs = {Output::s, Output::c, Output::F_T, Output::D_T};
    std::vector<thermal::SitePair> pairs;
    thermal::Symmetry symmetry = thermal::Symmetry::none;

    std::optional<std::filesystem::path> cache_dir;
    std::filesystem::path out = "results.csv";
    std::size_t workers = 1;

    [[nodiscard]] bool wants(Output o) const { return outputs.count(o) != 0; }
    [[nodiscard]] models::ModelSpec model(std::size_t length, double parameter) const;
    [[nodiscard]] thermal::TemperatureGrid grid() const;
    [[nodiscard]] lanczos::LanczosConfig lanczos() const;

    /// Throws ConfigError describing the first problem found.
    void validate() const;
};

/// Command-line values that replace the corresponding config entries.
struct Overrides {
    std::optional<std::string> model;
    std::vector<std::size_t> lengths;
    std::vector<double> h, g;
    std::optional<double> j;
    std::optional<double> t_min, t_max, t_step;
    std::optional<std::size_t> d_max, k_max, workers;
    std::vector<std::string> outputs;
    std::optional<std::filesystem::path> out, cache_dir;
};

void apply(RunConfig& cfg, const Overrides& o);

/// Parses YAML text; `source` names the input in diagnostics ("file:line:col: ...").
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Stable key over everything that determines the Lanczos runs of one job.
std::string run_key(const RunConfig& cfg, const models::ModelSpec& spec);

} // namespace mpotrace::cli
