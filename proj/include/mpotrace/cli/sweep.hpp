#pragma once

#include "mpotrace/cli/config.hpp"
#include "mpotrace/oracle.hpp"
#include "mpotrace/thermal.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mpotrace::cli {

struct JobResult {
    models::ModelSpec spec;
    thermal::ThermalSweepResult sweep;
    std::size_t identity_runs = 0;
    std::size_t projector_runs = 0;
    std::size_t cache_hits = 0;
};

struct SweepStats {
    std::size_t jobs = 0;
    std::size_t identity_runs = 0;  // executed, not loaded
    std::size_t projector_runs = 0; // executed, not loaded
    std::size_t cache_hits = 0;
};

struct SweepOutput {
    std::vector<JobResult> jobs; // L-major, then parameter, as listed in the config
    SweepStats stats;
};

/// Lanczos sweep over every (L, parameter) job, `workers` jobs at a time.
SweepOutput run_sweep(const RunConfig& cfg);

/// The same observables from exact diagonalization, refusing L > max_length.
SweepOutput run_exact(const RunConfig& cfg, std::size_t max_length = oracle::kDefaultMaxLength);

/// CSV text: model,L,param,T,logZ,energy_density,s,c,F_T,D_T[,Czz_i_j...];
/// 17 significant digits, unrequested outputs left empty.
std::string format_csv(const RunConfig& cfg, const SweepOutput& out);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws ConfigError if absent.
    [[nodiscard]] std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

struct ColumnDeviation {
    std::string column;
    double max_abs = 0.0;
    double max_rel = 0.0;
};

/// Per numeric column, the largest deviation between two tables with the
/// same header and row keys. Empty cells are skipped.
std::vector<ColumnDeviation> compare_tables(const CsvTable& a, const CsvTable& b);

} // namespace mpotrace::cli
