#include "mpotrace/errors.hpp"
#include "mpotrace/lanczos.hpp"
#include "mpotrace/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace mpotrace;
using namespace mpotrace::lanczos;
using testing::dense;
using testing::relative_error;

namespace {

LanczosConfig untruncated(std::size_t k_max) {
    LanczosConfig cfg;
    cfg.k_max = k_max;
    return cfg;
}

// trace(H^m) for m = 0..max_power from the dense matrix, by repeated products
std::vector<double> dense_moments(const Eigen::MatrixXcd& h, int max_power) {
    std::vector<double> out;
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
    for(int m = 0; m <= max_power; ++m) {
        out.push_back(p.trace().real());
        p = (p * h).eval();
    }
    return out;
}

} // namespace

TEST_CASE("multiple of the identity breaks down after one step") {
    for(std::size_t l : {1, 3, 6}) {
        const auto a = mpo::scalar_multiply(2.0, mpo::identity_mpo(l));
        auto run = run_lanczos(a, models::identity_block(l), untruncated(5));
        CHECK(run.projection.k() == 1);
        CHECK(run.projection.termination == Termination::breakdown);
        CHECK(run.projection.alphas[0] == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(run.projection.beta1 == doctest::Approx(std::pow(2.0, 0.5 * double(l))).epsilon(1e-14));

        const double n = std::ldexp(1.0, int(l));
        CHECK(evaluate(run, [](double) { return 1.0; }) == doctest::Approx(n).epsilon(1e-14));
        CHECK(evaluate(run, [](double x) { return x; }) == doctest::Approx(2.0 * n).epsilon(1e-14));
        const std::function<double(double)> fs[] = {[](double) { return 1.0; }, [](double x) { return x; }};
        auto many = evaluate_many(run, fs);
        REQUIRE(many.size() == 2);
        CHECK(many[0] == doctest::Approx(n));
        CHECK(many[1] == doctest::Approx(2.0 * n));
        CHECK(evaluate_many(run, {}).empty());
    }
}

TEST_CASE("sx sx closes after two steps") {
    auto run = run_lanczos(models::ising_mpo(2, 1.0, 0.0), models::identity_block(2), untruncated(10));
    CHECK(run.projection.k() == 2);
    CHECK(run.projection.termination == Termination::breakdown);
    CHECK(std::abs(run.projection.alphas[0]) < 1e-14);
    REQUIRE(run.quadrature.size() == 2);
    CHECK(run.quadrature.nodes[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(run.quadrature.nodes[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Ising L=8 quadrature") {
    const auto h = models::ising_mpo(8, 1.0, 1.0);
    const auto spec = oracle::exact_spectrum(h);

    const double lo = spec.values(0), hi = spec.values(spec.values.size() - 1);

    SUBCASE("nodes stay inside the spectrum with D=64 and reorthogonalization") {
        LanczosConfig cfg;
        cfg.k_max = 40;
        cfg.d_max = 64;
        cfg.reorthogonalization = Reorthogonalization::full;
        auto run = run_lanczos(h, models::identity_block(8), cfg);
        CHECK(run.quadrature.min_node() >= lo - 1e-8);
        CHECK(run.quadrature.max_node() <= hi + 1e-8);
    }
    SUBCASE("plain recurrence with D=64 overshoots by at most the truncation scale") {
        // about 4e-6 above the top eigenvalue; the operator is perturbed by truncation
        LanczosConfig cfg;
        cfg.k_max = 40;
        cfg.d_max = 64;
        auto run = run_lanczos(h, models::identity_block(8), cfg);
        CHECK(run.quadrature.min_node() >= lo - 1e-5);
        CHECK(run.quadrature.max_node() <= hi + 1e-5);
    }
    SUBCASE("second moment") {
        auto run = run_lanczos(h, models::identity_block(8), untruncated(6));
        CHECK(relative_error(evaluate(run, [](double x) { return x * x; }), 3840.0) <= 1e-8);
        CHECK(relative_error(run.quadrature.total_mass(), 256.0) <= 1e-10);
    }
}

TEST_CASE("Boltzmann weights on L=6 Ising") {
    const auto h = models::ising_mpo(6, 1.0, 1.0);
    const auto spec = oracle::exact_spectrum(h);
    auto run = run_lanczos(h, models::identity_block(6), untruncated(64));
    std::vector<std::function<double(double)>> fs;
    for(double beta : {0.5, 1.0, 2.0}) fs.push_back([beta](double x) { return std::exp(-beta * x); });
    const auto got = evaluate_many(run, fs);
    for(std::size_t k = 0; k < fs.size(); ++k) CHECK(relative_error(got[k], oracle::exact_trace(spec, fs[k])) <= 1e-8);
}

TEST_CASE("Gauss exactness on random Hermitian MPOs") {
    testing::Rng rng(21);
    for(int rep = 0; rep < 8; ++rep) {
        const std::size_t l = 2 + rep % 5, bond = 2 + rep % 3;
        const auto h = testing::random_hermitian_mpo(rng, l, bond);
        const auto moments = dense_moments(dense(h), 12);
        for(std::size_t k = 2; k <= 5; ++k) {
            auto run = run_lanczos(h, models::identity_block(l), untruncated(k));
            if(run.projection.termination == Termination::breakdown) continue; // exact for every degree
            for(int m = 0; m <= int(2 * k - 1); ++m) {
                const double g = evaluate(run, [m](double x) { return std::pow(x, m); });
                CHECK(std::abs(g - moments[m]) <= 1e-8 * std::max(std::abs(moments[m]), moments[0]));
            }
            if(k >= (std::size_t(1) << l)) continue; // K nodes resolve the whole spectrum
            const int m = int(2 * k);
            const double g = evaluate(run, [m](double x) { return std::pow(x, m); });
            CHECK(std::abs(g - moments[m]) > 1e-8 * std::abs(moments[m]));
        }
    }
}

TEST_CASE("nodes inside the spectrum and monotone convergence") {
    testing::Rng rng(22);
    for(int rep = 0; rep < 4; ++rep) {
        const std::size_t l = 3 + rep;
        const auto h = testing::random_hermitian_mpo(rng, l, 4);
        const auto spec = oracle::exact_spectrum(h);
        const double beta = 1.5;
        const double exact = oracle::exact_trace(spec, [&](double x) { return std::exp(-beta * x); });
        double prev = INFINITY;
        for(std::size_t k = 1; k <= 12; ++k) {
            auto run = run_lanczos(h, models::identity_block(l), untruncated(k));
            CHECK(run.quadrature.min_node() >= spec.values(0) - 1e-8);
            CHECK(run.quadrature.max_node() <= spec.values(spec.values.size() - 1) + 1e-8);
            const double err = std::abs(evaluate(run, [&](double x) { return std::exp(-beta * x); }) - exact);
            CHECK(err <= prev + 1e-10 * exact);
            prev = err;
            if(run.projection.termination == Termination::breakdown) break;
        }
    }
}

TEST_CASE("full reorthogonalization keeps the basis orthonormal") {
    testing::Rng rng(23);
    for(std::size_t l : {3, 4, 6}) {
        const auto h = testing::random_hermitian_mpo(rng, l, 3);
        LanczosConfig cfg = untruncated(15);
        cfg.reorthogonalization = Reorthogonalization::full;
        cfg.keep_basis = true;
        auto run = run_lanczos(h, models::identity_block(l), cfg);
        REQUIRE(run.basis.size() == run.projection.k());
        for(std::size_t i = 0; i < run.basis.size(); ++i)
            for(std::size_t j = 0; j < run.basis.size(); ++j) {
                const cplx g = mpo::inner_product(run.basis[i], run.basis[j]);
                CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-8);
            }
    }
}

TEST_CASE("recorded coefficients respect the breakdown threshold") {
    // few distinct eigenvalues, so the Krylov space closes early
    const auto h = models::ising_mpo(4, 1.0, 0.0);
    LanczosConfig cfg = untruncated(40);
    cfg.breakdown_tolerance = 1e-6;
    cfg.reorthogonalization = Reorthogonalization::full;
    auto run = run_lanczos(h, models::identity_block(4), cfg);
    CHECK(run.projection.termination == Termination::breakdown);
    for(double b : run.projection.betas) CHECK(b >= cfg.breakdown_tolerance * run.projection.beta1);
    CHECK(run.projection.betas.size() + 1 == run.projection.k());
    CHECK(run.compression_log.size() == run.projection.k());
    for(double w : run.quadrature.weights) CHECK(w >= 0.0);
    CHECK(relative_error(run.quadrature.total_mass(), 16.0) <= 1e-10);
}

TEST_CASE("determinism") {
    const auto h = models::lmg_mpo(6, 0.4);
    LanczosConfig cfg;
    cfg.k_max = 20;
    cfg.d_max = 8;
    auto a = run_lanczos(h, models::identity_block(6), cfg);
    auto b = run_lanczos(h, models::identity_block(6), cfg);
    CHECK(a.projection.alphas == b.projection.alphas);
    CHECK(a.projection.betas == b.projection.betas);
    CHECK(a.projection.beta1 == b.projection.beta1);
    CHECK(a.quadrature.nodes == b.quadrature.nodes);
    CHECK(a.quadrature.weights == b.quadrature.weights);
}

TEST_CASE("stop rules") {
    const auto h = models::ising_mpo(6, 1.0, 1.0);

    SUBCASE("partition function probe") {
        LanczosConfig cfg = untruncated(60);
        cfg.stop_rules.push_back(StopRule::partition_function(1.0, 1e-12));
        auto run = run_lanczos(h, models::identity_block(6), cfg);
        CHECK(run.projection.termination == Termination::stop_rule);
        CHECK(run.projection.k() < 60);
        const auto spec = oracle::exact_spectrum(h);
        const double z = oracle::exact_trace(spec, [](double x) { return std::exp(-x); });
        CHECK(relative_error(evaluate(run, [](double x) { return std::exp(-x); }), z) <= 1e-10);
    }
    SUBCASE("patience counts consecutive hits") {
        LanczosConfig quick = untruncated(60), patient = untruncated(60);
        quick.stop_rules.push_back(StopRule::relative_change([](double x) { return std::exp(-x); }, 1e-6, 1));
        patient.stop_rules.push_back(StopRule::relative_change([](double x) { return std::exp(-x); }, 1e-6, 4));
        auto a = run_lanczos(h, models::identity_block(6), quick);
        auto b = run_lanczos(h, models::identity_block(6), patient);
        CHECK(a.projection.termination == Termination::stop_rule);
        CHECK(b.projection.k() >= a.projection.k() + 3);
    }
    SUBCASE("node range") {
        LanczosConfig cfg = untruncated(60);
        cfg.stop_rules.push_back(StopRule::node_range(1e-10));
        auto run = run_lanczos(h, models::identity_block(6), cfg);
        CHECK(run.projection.termination == Termination::stop_rule);
        const auto spec = oracle::exact_spectrum(h);
        CHECK(run.quadrature.min_node() == doctest::Approx(spec.values(0)).epsilon(1e-9));
    }
}

TEST_CASE("errors") {
    testing::Rng rng(25);
    const auto a = testing::random_mpo(rng, 3, 2);
    CHECK_THROWS_AS(run_lanczos(a, models::identity_block(3), untruncated(4)), std::invalid_argument);
    CHECK_THROWS_AS(run_lanczos(models::ising_mpo(3, 1, 1), models::identity_block(4), untruncated(4)), ShapeError);
    const models::StartingBlock zero{mpo::zero_mpo(3), "zero", 0.0};
    CHECK_THROWS_AS(run_lanczos(models::ising_mpo(3, 1, 1), zero, untruncated(4)), std::invalid_argument);
    LanczosConfig bad = untruncated(0);
    CHECK_THROWS(run_lanczos(models::ising_mpo(3, 1, 1), models::identity_block(3), bad));

    auto run = run_lanczos(models::ising_mpo(3, 1, 1), models::identity_block(3), untruncated(8));
    CHECK_THROWS_AS(evaluate(run, [](double x) { return std::log(x); }), DomainError);
    CHECK(to_string(Termination::breakdown) == "breakdown");
}
