#include "mpotrace/cli/config.hpp"
#include "mpotrace/cli/peaks.hpp"
#include "mpotrace/cli/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mpotrace;
using namespace mpotrace::cli;

namespace {

std::string error_of(const std::string& yaml) {
    try {
        parse_config(yaml, "cfg.yaml").validate();
    } catch(const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mpotrace_cli_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

RunConfig small_ising() {
    RunConfig cfg = parse_config(R"(
model: {family: ising, L: 6, g: 1.0}
temperature: {min: 0.2, max: 1.0, step: 0.1}
lanczos: {kmax: 40, dmax: 64}
outputs: [s, c, F_T, D_T, Czz]
correlators: {pairs: [[2, 4]]}
)");
    cfg.validate();
    return cfg;
}

} // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"(
model: {family: lmg, L: [12, 16], h: [0.2, 1.2]}
temperature: {min: 0.1, max: 1.0, step: 0.01, delta: 0.005}
lanczos: {kmax: 70, dmax: 60, reorthogonalize: true, stop_tol: 1e-10}
outputs: [s, c]
cache: runs
out: lmg.csv
workers: 2
)");
    CHECK(cfg.family == models::Family::lmg);
    CHECK(cfg.lengths == std::vector<std::size_t>{12, 16});
    CHECK(cfg.parameters == std::vector<double>{0.2, 1.2});
    CHECK(cfg.grid().temperatures.size() == 91);
    CHECK(cfg.grid().delta_t == 0.005);
    CHECK(cfg.k_max == 70);
    CHECK(cfg.d_max == 60);
    CHECK(cfg.lanczos().reorthogonalization == lanczos::Reorthogonalization::full);
    CHECK(cfg.lanczos().stop_rules.size() == 1);
    CHECK(cfg.wants(Output::s));
    CHECK_FALSE(cfg.wants(Output::F_T));
    CHECK(cfg.cache_dir == std::filesystem::path("runs"));
    CHECK(cfg.out == std::filesystem::path("lmg.csv"));
    CHECK(cfg.workers == 2);
    CHECK_NOTHROW(cfg.validate());

    const auto ising = parse_config("model: {family: ising, L: 8, J: -1}");
    CHECK(ising.parameters == std::vector<double>{1.0});
    CHECK(ising.coupling_j == -1.0);
    CHECK(ising.model(8, 0.5).label() == "ising(L=8,J=-1,g=0.5)");
}

TEST_CASE("config errors carry line and column") {
    CHECK(error_of("model: {family: ising, L: 8}\nlanczos: {kmax: 70, dmaxx: 3}\n").rfind("cfg.yaml:2:", 0) == 0);
    CHECK(error_of("model: {family: potts, L: 8}\n").find("cfg.yaml:1:") == 0);
    CHECK(error_of("model: {family: ising, L: 8}\ntemperature: {min: abc}\n").find("cfg.yaml:2:") == 0);
    CHECK(error_of("model: {family: ising, L: [8\n").find("cfg.yaml:") == 0);
    CHECK(error_of("model: {family: lmg, L: 8, g: 1}\n").find("Ising") != std::string::npos);
    CHECK(error_of("temperature: {min: 0.1}\n").find("model") != std::string::npos);
    CHECK(error_of("model: {family: ising, L: 8}\noutputs: []\n").find("at least one output") != std::string::npos);
    CHECK(error_of("model: {family: ising, L: 8}\noutputs: [s, q]\n").find("cfg.yaml:2:") == 0);
    CHECK(error_of("model: {family: ising, L: 8}\noutputs: [Czz]\n").find("pairs") != std::string::npos);
    CHECK(error_of("model: {family: ising, L: 8}\noutputs: [Czz]\ncorrelators: {pairs: [[3, 9]]}\n").find("outside") !=
          std::string::npos);
    CHECK(error_of("model: {family: ising, L: 8}\ntemperature: {min: 1.0, max: 0.5}\n").find("temperature") !=
          std::string::npos);
    CHECK(error_of("model: {family: ising, L: 8}\nlanczos: {kmax: 0}\n").find("kmax") != std::string::npos);
    CHECK(error_of("model: {family: lmg, L: 8, h: 0.2}\n").empty());
}

TEST_CASE("overrides") {
    RunConfig cfg = parse_config("model: {family: lmg, L: 8, h: 0.2}");
    Overrides o;
    o.lengths = {10, 12};
    o.h = {0.5};
    o.k_max = 20;
    o.outputs = {"c"};
    apply(cfg, o);
    CHECK(cfg.lengths == std::vector<std::size_t>{10, 12});
    CHECK(cfg.parameters == std::vector<double>{0.5});
    CHECK(cfg.k_max == 20);
    CHECK(cfg.outputs == std::set<Output>{Output::c});

    Overrides wrong;
    wrong.g = {1.0};
    CHECK_THROWS_AS(apply(cfg, wrong), ConfigError);

    // switching family drops the other family's field
    Overrides to_ising;
    to_ising.model = "ising";
    apply(cfg, to_ising);
    CHECK(cfg.family == models::Family::ising);
    CHECK(cfg.parameters == std::vector<double>{1.0});
}

TEST_CASE("run key tracks what determines the runs") {
    RunConfig a = parse_config("model: {family: lmg, L: 8, h: 0.2}");
    const auto spec = a.model(8, 0.2);
    const auto key = run_key(a, spec);
    CHECK(key.rfind("lmg-", 0) == 0);
    CHECK(run_key(a, spec) == key);

    RunConfig b = a;
    b.t_max = 3.0;
    b.outputs = {Output::c};
    CHECK(run_key(b, spec) == key);
    b.d_max = 61;
    CHECK(run_key(b, spec) != key);
    CHECK(run_key(a, a.model(8, 0.2000001)) != key);
    CHECK(run_key(a, a.model(10, 0.2)) != key);
}

TEST_CASE("peak finding") {
    std::vector<double> t, v;
    for(int k = 0; k <= 10; ++k) {
        t.push_back(0.1 * k);
        v.push_back(std::pow(0.1 * k - 0.5, 2));
    }
    const auto p = find_peak(t, v, Extremum::minimum);
    CHECK(std::abs(p.location - 0.5) <= 1e-12);
    CHECK(p.uncertainty == doctest::Approx(0.05));
    CHECK(p.index == 5);

    // off-grid vertex
    std::vector<double> w;
    for(double x : t) w.push_back(-std::pow(x - 0.43, 2));
    const auto q = find_peak(t, w);
    CHECK(q.location == doctest::Approx(0.43).epsilon(1e-12));
    CHECK(q.index == 4);

    std::vector<double> mono(t.begin(), t.end());
    CHECK_THROWS_AS(find_peak(t, mono), BoundaryExtremum);
    const std::vector<double> two{0.1, 0.2};
    CHECK_THROWS(find_peak(two, two));
}

TEST_CASE("critical temperature extrapolation") {
    const double tc = 0.47, a = 1.3;
    std::vector<std::pair<std::size_t, double>> peaks;
    for(std::size_t l : {40, 60, 70, 80}) peaks.emplace_back(l, tc + a / double(l));
    const auto e = extrapolate_tc(peaks);
    CHECK(std::abs(e.tc - tc) <= 1e-10);
    CHECK(e.slope == doctest::Approx(a).epsilon(1e-9));
    REQUIRE(e.uncertainty);
    CHECK(*e.uncertainty <= 1e-10);

    const auto two = extrapolate_tc({{12, 0.3}, {16, 0.35}});
    CHECK(two.tc == doctest::Approx(0.5));
    CHECK_FALSE(two.uncertainty);
    CHECK_THROWS(extrapolate_tc({{12, 0.3}}));

    CHECK(exact_tc(0.2) == doctest::Approx(0.49326).epsilon(1e-5));
    CHECK(std::abs(exact_tc(0.2) - 0.2 / std::log(1.5)) <= 1e-14);
    CHECK(std::abs(exact_tc(0.5) - 0.45512) <= 1e-5);
    CHECK(exact_tc(1e-8) == doctest::Approx(0.5));
    CHECK_THROWS(exact_tc(0.0));
    CHECK_THROWS(exact_tc(1.0));
}

TEST_CASE("forward difference") {
    const std::vector<double> t{0.1, 0.2, 0.4}, v{1.0, 2.0, 2.5};
    const auto d = forward_difference(t, v);
    REQUIRE(d.size() == 2);
    CHECK(d[0] == doctest::Approx(10.0));
    CHECK(d[1] == doctest::Approx(2.5));
}

TEST_CASE("csv parsing and comparison") {
    const auto a = parse_csv("model,L,param,T,s\nising,4,1,0.5,0.25\nising,4,1,0.6,\n");
    CHECK(a.header.size() == 5);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.rows[1][4].empty());
    CHECK(a.column("s") == 4);
    CHECK_THROWS_AS((void)a.column("c"), ConfigError);

    const auto b = parse_csv("model,L,param,T,s\nising,4,1,0.5,0.2500001\nising,4,1,0.6,\n");
    const auto dev = compare_tables(a, b);
    REQUIRE(dev.size() == 1);
    CHECK(dev[0].column == "s");
    CHECK(dev[0].max_abs == doctest::Approx(1e-7));

    const auto c = parse_csv("model,L,param,T,s\nising,4,1,0.7,0.25\nising,4,1,0.6,\n");
    CHECK_THROWS(compare_tables(a, c));
}

TEST_CASE("sweep: Ising L=8 CSV against the oracle") {
    RunConfig cfg = parse_config(R"(
model: {family: ising, L: 8, g: 1.0}
temperature: {min: 0.2, max: 1.0, step: 0.1}
lanczos: {kmax: 40, dmax: 256}
outputs: [s, c]
)");
    const auto out = run_sweep(cfg);
    const auto table = parse_csv(format_csv(cfg, out));
    CHECK(table.header ==
          std::vector<std::string>{"model", "L", "param", "T", "logZ", "energy_density", "s", "c", "F_T", "D_T"});
    CHECK(table.rows.size() == 9);
    for(const auto& row : table.rows) {
        CHECK(row[8].empty());
        CHECK(row[9].empty());
    }
    CHECK(out.stats.identity_runs == 1);
    CHECK(out.stats.projector_runs == 0);

    const auto exact = parse_csv(format_csv(cfg, run_exact(cfg)));
    for(const auto& d : compare_tables(table, exact)) CHECK(d.max_rel <= 1e-6);

    RunConfig big = cfg;
    big.lengths = {14};
    CHECK_THROWS_AS(run_exact(big), ConfigError);
}

TEST_CASE("sweep: determinism, counters and cache") {
    const auto dir = scratch("cache");
    RunConfig cfg = small_ising();
    const auto cold = run_sweep(cfg);
    const std::string text = format_csv(cfg, cold);
    CHECK(format_csv(cfg, run_sweep(cfg)) == text);
    CHECK(cold.stats.identity_runs == 1);
    CHECK(cold.stats.projector_runs == 4);
    CHECK(text.rfind("model,L,param,T,logZ,energy_density,s,c,F_T,D_T,Czz_2_4\n", 0) == 0);

    cfg.cache_dir = dir;
    const auto first = run_sweep(cfg);
    CHECK(format_csv(cfg, first) == text);
    CHECK(first.stats.cache_hits == 0);
    const auto second = run_sweep(cfg);
    CHECK(format_csv(cfg, second) == text);
    CHECK(second.stats.identity_runs == 0);
    CHECK(second.stats.projector_runs == 0);
    CHECK(second.stats.cache_hits == 5);

    // a wider grid reuses the same runs
    RunConfig wider = cfg;
    wider.t_max = 2.0;
    CHECK(run_sweep(wider).stats.cache_hits == 5);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep: workers do not change the output") {
    RunConfig cfg = parse_config(R"(
model: {family: lmg, L: [4, 5, 6], h: [0.2, 1.2]}
temperature: {min: 0.1, max: 1.0, step: 0.1}
lanczos: {kmax: 30, dmax: 32}
)");
    const std::string serial = format_csv(cfg, run_sweep(cfg));
    cfg.workers = 3;
    const auto parallel = run_sweep(cfg);
    CHECK(format_csv(cfg, parallel) == serial);
    CHECK(parallel.stats.jobs == 6);
    CHECK(parallel.stats.identity_runs == 6);
}

TEST_CASE("spin-flip sweeps need a symmetric Hamiltonian") {
    RunConfig cfg = small_ising();
    cfg.symmetry = thermal::Symmetry::spin_flip;
    CHECK_THROWS_AS(run_sweep(cfg), ConfigError);

    cfg = parse_config(R"(
model: {family: lmg, L: 6, h: 0.0}
temperature: {min: 0.2, max: 1.0, step: 0.1}
lanczos: {kmax: 40, dmax: 64}
outputs: [s, Czz]
correlators: {pairs: [[1, 2], [2, 5]], symmetry: spin_flip}
)");
    const auto out = run_sweep(cfg);
    CHECK(out.stats.projector_runs == 4);
    const auto got = parse_csv(format_csv(cfg, out)), want = parse_csv(format_csv(cfg, run_exact(cfg)));
    for(const auto& d : compare_tables(got, want))
        if(d.column.rfind("Czz", 0) == 0) CHECK(d.max_abs <= 1e-8);
}

TEST_CASE("atomic file write") {
    const auto dir = scratch("write");
    write_file_atomic(dir / "out.csv", "a,b\n1,2\n");
    std::ifstream in(dir / "out.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "a,b\n1,2\n");
    CHECK(read_csv(dir / "out.csv").rows.size() == 1);
    std::filesystem::remove_all(dir);
}
