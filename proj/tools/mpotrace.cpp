// mpotrace: thermal sweeps of spin chains through Lanczos quadrature on MPOs.

#include "mpotrace/cli/config.hpp"
#include "mpotrace/cli/peaks.hpp"
#include "mpotrace/cli/sweep.hpp"
#include "mpotrace/errors.hpp"
#include "mpotrace/serialization.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace {

using namespace mpotrace;
using namespace mpotrace::cli;

enum Exit { ok = 0, other = 1, config = 2, numerical = 3, cache = 4 };

struct RunOptions {
    std::optional<std::filesystem::path> config;
    Overrides overrides;
};

void add_run_options(CLI::App* sub, RunOptions& o) {
    sub->set_help_flag("--help", "print this help and exit"); // -h would clash with --h
    sub->add_option("--config", o.config, "YAML run configuration");
    sub->add_option("--model", o.overrides.model, "ising or lmg");
    sub->add_option("--L", o.overrides.lengths, "chain lengths")->delimiter(',');
    sub->add_option("--h", o.overrides.h, "LMG fields")->delimiter(',');
    sub->add_option("--g", o.overrides.g, "Ising transverse fields")->delimiter(',');
    sub->add_option("--J", o.overrides.j, "Ising coupling");
    sub->add_option("--tmin", o.overrides.t_min);
    sub->add_option("--tmax", o.overrides.t_max);
    sub->add_option("--tstep", o.overrides.t_step);
    sub->add_option("--dmax", o.overrides.d_max, "bond dimension cap");
    sub->add_option("--kmax", o.overrides.k_max, "Krylov depth");
    sub->add_option("--outputs", o.overrides.outputs, "subset of s,c,F_T,D_T,Czz")->delimiter(',');
    sub->add_option("--out", o.overrides.out, "CSV path");
    sub->add_option("--cache", o.overrides.cache_dir, "directory for cached Lanczos runs");
    sub->add_option("--workers", o.overrides.workers, "parallel jobs");
}

RunConfig resolve(const RunOptions& o) {
    RunConfig cfg;
    if(o.config) {
        cfg = load_config(*o.config);
    } else if(!o.overrides.model) {
        throw ConfigError("either --config or --model is required");
    }
    apply(cfg, o.overrides);
    cfg.validate();
    return cfg;
}

int cmd_sweep(const RunOptions& o) {
    const auto cfg = resolve(o);
    const auto result = run_sweep(cfg);
    write_file_atomic(cfg.out, format_csv(cfg, result));
    fmt::print(stderr, "{}: {} jobs, {} identity runs, {} projector runs, {} cache hits\n", cfg.out.string(), result.stats.jobs,
               result.stats.identity_runs, result.stats.projector_runs, result.stats.cache_hits);
    return ok;
}

int cmd_exact(const RunOptions& o, std::size_t max_length, const std::optional<std::filesystem::path>& against) {
    const auto cfg = resolve(o);
    const auto result = run_exact(cfg, max_length);
    const auto text = format_csv(cfg, result);
    write_file_atomic(cfg.out, text);
    fmt::print(stderr, "{}: {} jobs\n", cfg.out.string(), result.stats.jobs);
    if(against) {
        const auto devs = compare_tables(read_csv(*against), parse_csv(text));
        fmt::print("{:<16} {:>12} {:>12}\n", "column", "max_abs", "max_rel");
        for(const auto& d : devs) fmt::print("{:<16} {:>12.3e} {:>12.3e}\n", d.column, d.max_abs, d.max_rel);
    }
    return ok;
}

struct Series {
    std::vector<double> t, v;
};

int cmd_tc(const std::vector<std::filesystem::path>& files, const std::string& column, bool minimum, bool derivative) {
    // (model, param) -> L -> series
    std::map<std::pair<std::string, std::string>, std::map<std::size_t, Series>> groups;
    for(const auto& f : files) {
        const auto table = read_csv(f);
        const auto cm = table.column("model"), cl = table.column("L"), cp = table.column("param"), ct = table.column("T");
        const auto cv = table.column(column);
        for(const auto& row : table.rows) {
            if(row[cv].empty()) throw ConfigError(fmt::format("{}: column {} is empty", f.string(), column));
            auto& s = groups[{row[cm], row[cp]}][std::stoul(row[cl])];
            s.t.push_back(std::stod(row[ct]));
            s.v.push_back(std::stod(row[cv]));
        }
    }
    const auto kind = minimum ? Extremum::minimum : Extremum::maximum;
    for(auto& [key, by_length] : groups) {
        const auto& [model, param] = key;
        const char* pname = model == "lmg" ? "h" : "g";
        const double pv = std::stod(param);
        std::vector<std::pair<std::size_t, double>> peaks;
        for(auto& [length, s] : by_length) {
            std::vector<std::size_t> order(s.t.size());
            for(std::size_t k = 0; k < order.size(); ++k) order[k] = k;
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.t[a] < s.t[b]; });
            Series sorted;
            for(auto k : order) {
                sorted.t.push_back(s.t[k]);
                sorted.v.push_back(s.v[k]);
            }
            if(derivative) {
                sorted.v = forward_difference(sorted.t, sorted.v);
                sorted.t.pop_back();
            }
            try {
                const auto p = find_peak(sorted.t, sorted.v, kind);
                fmt::print("{} {}={:g} L={} T_peak={:.6f} +- {:.6f} value={:.10g}\n", model, pname, pv, length, p.location,
                           p.uncertainty, p.value);
                peaks.emplace_back(length, p.location);
            } catch(const BoundaryExtremum& e) {
                fmt::print("{} {}={:g} L={} boundary extremum at T={}\n", model, pname, pv, length, e.location);
            } catch(const std::invalid_argument& e) {
                fmt::print("{} {}={:g} L={} skipped: {}\n", model, pname, pv, length, e.what());
            }
        }
        if(peaks.size() >= 2) {
            const auto tc = extrapolate_tc(peaks);
            if(tc.uncertainty)
                fmt::print("{} {}={:g} T_c={:.6f} +- {:.6f} slope={:.6f}\n", model, pname, pv, tc.tc, *tc.uncertainty, tc.slope);
            else
                fmt::print("{} {}={:g} T_c={:.6f} slope={:.6f}\n", model, pname, pv, tc.tc, tc.slope);
        }
        if(model == "lmg" && pv > 0.0 && pv < 1.0) fmt::print("{} {}={:g} exact T_c={:.6f}\n", model, pname, pv, exact_tc(pv));
    }
    return ok;
}

int cmd_inspect(const std::filesystem::path& file) {
    const auto run = serialization::load_run(file);
    const auto& p = run.projection;
    fmt::print("operator     {}\n", run.operator_label);
    fmt::print("start        {}\n", run.start_label);
    fmt::print("sites        {}\n", run.sites);
    fmt::print("fingerprint  {:016x}\n", run.operator_fingerprint);
    fmt::print("termination  {}\n", lanczos::to_string(p.termination));
    fmt::print("K            {}\n", p.k());
    fmt::print("beta_1       {:.17g}\n\n", p.beta1);
    fmt::print("{:>4} {:>25} {:>25} {:>12} {:>6}\n", "i", "alpha_i", "beta_i", "discarded", "bond");
    for(std::size_t i = 0; i < p.k(); ++i) {
        const std::string beta = i == 0 ? fmt::format("{:.17g}", p.beta1) : fmt::format("{:.17g}", p.betas[i - 1]);
        std::string disc = "", bond = "";
        if(i < run.compression_log.size()) {
            disc = fmt::format("{:.3e}", run.compression_log[i].discarded_weight);
            bond = fmt::format("{}", run.compression_log[i].max_bond_dimension);
        }
        fmt::print("{:>4} {:>25.17g} {:>25} {:>12} {:>6}\n", i + 1, p.alphas[i], beta, disc, bond);
    }
    fmt::print("\n{:>4} {:>25} {:>25}\n", "j", "node", "weight");
    for(std::size_t j = 0; j < run.quadrature.size(); ++j)
        fmt::print("{:>4} {:>25.17g} {:>25.17g}\n", j + 1, run.quadrature.nodes[j], run.quadrature.weights[j]);
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal observables of spin chains from global Lanczos quadrature on MPOs"};
    app.require_subcommand(1);

    RunOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "run the Lanczos sweep and write CSV");
    add_run_options(sweep, sweep_opts);

    RunOptions exact_opts;
    std::size_t max_length = oracle::kDefaultMaxLength;
    std::optional<std::filesystem::path> against;
    auto* exact = app.add_subcommand("exact", "same sweep by exact diagonalization");
    add_run_options(exact, exact_opts);
    exact->add_option("--max-L", max_length, "largest chain accepted by the dense solver");
    exact->add_option("--against", against, "Lanczos CSV to compare with")->check(CLI::ExistingFile);

    std::vector<std::filesystem::path> tc_files;
    std::string column = "c";
    bool minimum = false, derivative = false;
    auto* tc = app.add_subcommand("tc", "peak positions and T_c extrapolation from sweep CSVs");
    tc->add_option("files", tc_files, "CSV files")->required()->check(CLI::ExistingFile);
    tc->add_option("--column", column, "observable column");
    tc->add_flag("--min", minimum, "locate a minimum (default for F_T)");
    tc->add_flag("--derivative", derivative, "use the forward temperature difference of the column");

    std::filesystem::path run_path;
    auto* inspect = app.add_subcommand("inspect-run", "dump a cached Lanczos run");
    inspect->add_option("file", run_path)->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch(const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config;
    }

    try {
        if(*sweep) return cmd_sweep(sweep_opts);
        if(*exact) return cmd_exact(exact_opts, max_length, against);
        if(*tc) return cmd_tc(tc_files, column, minimum || column == "F_T", derivative);
        if(*inspect) return cmd_inspect(run_path);
    } catch(const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return config;
    } catch(const CacheMismatch& e) {
        fmt::print(stderr, "cache mismatch: {}\n", e.what());
        return cache;
    } catch(const FormatError& e) {
        fmt::print(stderr, "bad run file: {}\n", e.what());
        return cache;
    } catch(const NumericalError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return numerical;
    } catch(const DomainError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return numerical;
    } catch(const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return other;
    }
    return other;
}
