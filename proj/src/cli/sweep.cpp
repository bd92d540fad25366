#include "mpotrace/cli/sweep.hpp"

#include "mpotrace/errors.hpp"
#include "mpotrace/oracle.hpp"
#include "mpotrace/serialization.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace mpotrace::cli {

namespace fs = std::filesystem;

namespace {

struct Job {
    std::size_t length;
    double parameter;
};

std::vector<Job> jobs_of(const RunConfig& cfg) {
    std::vector<Job> jobs;
    for(auto l : cfg.lengths)
        for(double p : cfg.parameters) jobs.push_back({l, p});
    return jobs;
}

// Runs fn(i) for every job index on `workers` threads. Results land in
// per-index slots, so the output order never depends on scheduling.
template<typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for(std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch(...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(workers, n);
    if(threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for(std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
        for(auto& th : pool) th.join();
    }
    for(auto& e : errors)
        if(e) std::rethrow_exception(e);
}

fs::path run_file(const fs::path& dir, const std::string& label) { return dir / (label + ".run"); }

void attach_cache(thermal::RunPool& pool, const fs::path& dir) {
    fs::create_directories(dir);
    const auto hpath = dir / "hamiltonian.mpo";
    if(fs::exists(hpath)) {
        mpo::Mpo cached = [&] {
            try {
                return serialization::load_mpo(hpath);
            } catch(const FormatError& e) {
                throw CacheMismatch(hpath.string() + ": " + e.what());
            }
        }();
        if(mpo::fingerprint(cached) != mpo::fingerprint(pool.hamiltonian()))
            throw CacheMismatch(hpath.string() + ": cached Hamiltonian differs from the configured model");
    } else {
        serialization::save_mpo(hpath, pool.hamiltonian());
    }
    pool.set_loader([dir](const std::string& label) -> std::optional<lanczos::LanczosRun> {
        const auto p = run_file(dir, label);
        if(!fs::exists(p)) return std::nullopt;
        try {
            return serialization::load_run(p);
        } catch(const FormatError& e) {
            throw CacheMismatch(p.string() + ": " + e.what());
        }
    });
    pool.set_saver([dir](const lanczos::LanczosRun& run) { serialization::save_run(run_file(dir, run.start_label), run); });
}

std::string cell(double v) { return fmt::format("{:.17g}", v); }

} // namespace

SweepOutput run_sweep(const RunConfig& cfg) {
    cfg.validate();
    const auto grid = cfg.grid();
    const auto betas = grid.betas();
    const auto jobs = jobs_of(cfg);
    SweepOutput out;
    out.jobs.resize(jobs.size());

    parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
        const auto spec = cfg.model(jobs[i].length, jobs[i].parameter);
        auto h = models::build_hamiltonian(spec);
        if(cfg.wants(Output::Czz) && cfg.symmetry == thermal::Symmetry::spin_flip && !thermal::commutes_with_spin_flip(h))
            throw ConfigError(spec.label() + " does not commute with the global spin flip; use symmetry none");
        thermal::RunPool pool(std::move(h), cfg.lanczos(), spec.label());
        if(cfg.cache_dir) attach_cache(pool, *cfg.cache_dir / run_key(cfg, spec));

        JobResult& r = out.jobs[i];
        r.spec = spec;
        r.sweep = thermal::thermal_sweep(pool.identity(), grid);
        if(cfg.wants(Output::Czz)) {
            r.sweep.correlator_sites = cfg.pairs;
            for(const auto& pair : cfg.pairs) {
                const auto c = thermal::correlation_zz(pool, pair, betas, cfg.symmetry);
                for(std::size_t k = 0; k < c.size(); ++k) r.sweep.records[k].correlators.push_back(c[k]);
            }
        }
        r.identity_runs = pool.identity_runs();
        r.projector_runs = pool.projector_runs();
        r.cache_hits = pool.cache_hits();
    });

    out.stats.jobs = jobs.size();
    for(const auto& r : out.jobs) {
        out.stats.identity_runs += r.identity_runs;
        out.stats.projector_runs += r.projector_runs;
        out.stats.cache_hits += r.cache_hits;
    }
    return out;
}

SweepOutput run_exact(const RunConfig& cfg, std::size_t max_length) {
    cfg.validate();
    const auto grid = cfg.grid();
    const auto jobs = jobs_of(cfg);
    SweepOutput out;
    out.jobs.resize(jobs.size());
    const std::span<const thermal::SitePair> pairs =
        cfg.wants(Output::Czz) ? std::span<const thermal::SitePair>(cfg.pairs) : std::span<const thermal::SitePair>();

    parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
        const auto spec = cfg.model(jobs[i].length, jobs[i].parameter);
        if(spec.length > max_length)
            throw ConfigError(fmt::format("exact: L={} exceeds the dense limit of {}", spec.length, max_length));
        const auto h = models::build_hamiltonian(spec);
        const auto spectrum = oracle::exact_spectrum(h, !pairs.empty(), max_length);
        out.jobs[i].spec = spec;
        out.jobs[i].sweep = oracle::exact_observables(spectrum, grid, pairs);
    });
    out.stats.jobs = jobs.size();
    return out;
}

std::string format_csv(const RunConfig& cfg, const SweepOutput& out) {
    std::string text = "model,L,param,T,logZ,energy_density,s,c,F_T,D_T";
    if(cfg.wants(Output::Czz))
        for(const auto& p : cfg.pairs) text += fmt::format(",Czz_{}_{}", p.i, p.j);
    text += '\n';
    auto opt = [&](Output o, double v) { return cfg.wants(o) ? cell(v) : std::string(); };
    for(const auto& job : out.jobs) {
        for(const auto& r : job.sweep.records) {
            text += fmt::format("{},{},{},{},{},{},{},{},{},{}", job.spec.name(), job.spec.length, cell(job.spec.parameter()),
                                cell(r.temperature), cell(r.log_z), cell(r.energy_density), opt(Output::s, r.entropy),
                                opt(Output::c, r.specific_heat), opt(Output::F_T, r.fidelity),
                                opt(Output::D_T, r.trace_distance));
            for(double c : r.correlators) text += "," + cell(c);
            text += '\n';
        }
    }
    return text;
}

void write_file_atomic(const fs::path& path, const std::string& text) {
    if(path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if(!f) throw std::runtime_error("cannot write " + tmp.string());
        f << text;
        f.flush();
        if(!f) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path);
}

std::size_t CsvTable::column(const std::string& name) const {
    for(std::size_t k = 0; k < header.size(); ++k)
        if(header[k] == name) return k;
    throw ConfigError("CSV has no column '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        for(;;) {
            const auto comma = s.find(',', start);
            cells.push_back(s.substr(start, comma - start));
            if(comma == std::string::npos) break;
            start = comma + 1;
        }
        return cells;
    };
    while(std::getline(in, line)) {
        if(!line.empty() && line.back() == '\r') line.pop_back();
        if(line.empty()) continue;
        auto cells = split(line);
        if(t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if(cells.size() != t.header.size())
            throw ConfigError(fmt::format("CSV row {} has {} cells, header has {}", t.rows.size() + 2, cells.size(), t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if(t.header.empty()) throw ConfigError("CSV is empty");
    return t;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream f(path);
    if(!f) throw ConfigError("cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

std::vector<ColumnDeviation> compare_tables(const CsvTable& a, const CsvTable& b) {
    if(a.header != b.header) throw ConfigError("CSV headers differ");
    if(a.rows.size() != b.rows.size()) throw ConfigError("CSV row counts differ");
    constexpr std::size_t kKeyColumns = 4; // model, L, param, T
    for(std::size_t r = 0; r < a.rows.size(); ++r)
        for(std::size_t c = 0; c < kKeyColumns && c < a.header.size(); ++c)
            if(a.rows[r][c] != b.rows[r][c]) throw ConfigError(fmt::format("CSV rows differ in {} at row {}", a.header[c], r + 2));
    std::vector<ColumnDeviation> out;
    for(std::size_t c = kKeyColumns; c < a.header.size(); ++c) {
        ColumnDeviation d{a.header[c]};
        for(std::size_t r = 0; r < a.rows.size(); ++r) {
            if(a.rows[r][c].empty() || b.rows[r][c].empty()) continue;
            const double x = std::stod(a.rows[r][c]), y = std::stod(b.rows[r][c]);
            const double diff = std::abs(x - y);
            d.max_abs = std::max(d.max_abs, diff);
            if(y != 0.0) d.max_rel = std::max(d.max_rel, diff / std::abs(y));
        }
        out.push_back(d);
    }
    return out;
}

} // namespace mpotrace::cli
