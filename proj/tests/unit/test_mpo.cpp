#include "mpotrace/errors.hpp"
#include "mpotrace/models.hpp"
#include "mpotrace/mpo.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace mpotrace;
using namespace mpotrace::mpo;
using testing::dense;
using testing::relative_error;

namespace {

Eigen::MatrixXcd eye(Eigen::Index n) { return Eigen::MatrixXcd::Identity(n, n); }

Mpo ising_j_part(std::size_t length) { return models::ising_mpo(length, 1.0, 0.0); }

} // namespace

TEST_CASE("bond bookkeeping") {
    testing::Rng rng(10);
    auto u = testing::random_mpo(rng, 4, 3);
    CHECK(u.bond_dimensions() == std::vector<std::size_t>{3, 3, 3});
    CHECK(u.max_bond_dimension() == 3);
    CHECK(identity_mpo(1).max_bond_dimension() == 1);

    std::vector<tensor::DenseTensor> bad{tensor::DenseTensor({1, 2, 2, 2}), tensor::DenseTensor({3, 2, 2, 1})};
    CHECK_THROWS_AS(Mpo{bad}, ShapeError);
    std::vector<tensor::DenseTensor> open{tensor::DenseTensor({2, 2, 2, 1})};
    CHECK_THROWS_AS(Mpo{open}, ShapeError);
    CHECK_THROWS_AS(Mpo{std::vector<tensor::DenseTensor>{}}, ShapeError);
}

TEST_CASE("identity") {
    CHECK(relative_error(dense(identity_mpo(1)), eye(2)) == 0.0);
    CHECK(relative_error(dense(identity_mpo(2)), eye(4)) == 0.0);
    CHECK(trace(identity_mpo(3)).real() == 8.0);
    CHECK(frobenius_norm(identity_mpo(4)) == doctest::Approx(4.0));
    CHECK(frobenius_norm(identity_mpo(6)) == doctest::Approx(8.0));
}

TEST_CASE("inner products") {
    CHECK(inner_product(identity_mpo(5), identity_mpo(5)).real() == doctest::Approx(32.0));
    const auto xx = models::ising_mpo(2, 1.0, 0.0);
    CHECK(std::abs(inner_product(identity_mpo(2), xx)) < 1e-14);
    CHECK(inner_product(xx, xx).real() == doctest::Approx(4.0));
    CHECK(frobenius_norm(zero_mpo(4)) == 0.0);
    CHECK(frobenius_norm(models::ising_mpo(2, 1.0, 1.0)) == doctest::Approx(std::sqrt(12.0)));

    testing::Rng rng(11);
    for(int rep = 0; rep < 10; ++rep) {
        auto u = testing::random_mpo(rng, 4, 2), v = testing::random_mpo(rng, 4, 3);
        const cplx uv = inner_product(u, v), vu = inner_product(v, u);
        CHECK(std::abs(uv - std::conj(vu)) <= 1e-10 * std::abs(uv));
        const cplx uu = inner_product(u, u);
        CHECK(uu.real() > 0.0);
        CHECK(std::abs(uu.imag()) <= 1e-10 * uu.real());
        const cplx ref = (dense(u).adjoint() * dense(v)).trace();
        CHECK(std::abs(uv - ref) <= 1e-10 * std::abs(ref));
    }
}

TEST_CASE("scalar multiply and adjoint") {
    CHECK(trace(scalar_multiply(0.0, identity_mpo(3))).real() == 0.0);
    CHECK(trace(scalar_multiply(2.0, identity_mpo(3))).real() == 16.0);
    const auto h = models::ising_mpo(5, 1.0, 0.7);
    const auto unit = scalar_multiply(1.0 / std::sqrt(inner_product(h, h).real()), h);
    CHECK(std::abs(frobenius_norm(unit) - 1.0) <= 1e-12);

    testing::Rng rng(12);
    auto u = testing::random_mpo(rng, 3, 2);
    CHECK(relative_error(dense(adjoint(u)), dense(u).adjoint()) < 1e-14);
}

TEST_CASE("sum examples") {
    auto zero = sum(identity_mpo(4), scalar_multiply(-1.0, identity_mpo(4)), kUnbounded);
    CHECK(frobenius_norm(zero.mpo) <= 1e-14 * 4.0);
    CHECK(zero.mpo.max_bond_dimension() == 1);

    auto two = sum(identity_mpo(4), identity_mpo(4), kUnbounded);
    CHECK(frobenius_norm(two.mpo) == doctest::Approx(8.0));
    CHECK(two.mpo.max_bond_dimension() == 1);

    auto g_part = sum(models::ising_mpo(4, 1.0, 1.0), scalar_multiply(-1.0, ising_j_part(4)), kUnbounded).mpo;
    CHECK(relative_error(dense(g_part), dense(models::ising_mpo(4, 0.0, 1.0))) < 1e-10);
}

TEST_CASE("multiply examples") {
    const auto h = models::ising_mpo(4, 1.0, 0.3);
    auto hi = multiply(h, identity_mpo(4), kUnbounded);
    CHECK(relative_error(dense(hi.mpo), dense(h)) < 1e-12);
    CHECK(hi.mpo.bond_dimensions() == compress(h, kUnbounded).mpo.bond_dimensions());

    const auto xx = models::ising_mpo(2, 1.0, 0.0);
    auto sq = multiply(xx, xx, kUnbounded);
    CHECK(relative_error(dense(sq.mpo), eye(4)) < 1e-12);
    CHECK(trace(sq.mpo).real() == doctest::Approx(4.0));

    auto lmg = multiply(models::lmg_mpo(2, 0.0), identity_mpo(2), 9);
    Eigen::MatrixXcd expect = -0.25 * (eye(4) + dense(xx));
    CHECK(relative_error(dense(lmg.mpo), expect) < 1e-12);
    CHECK(trace(lmg.mpo).real() == doctest::Approx(-1.0));
}

TEST_CASE("compress examples") {
    auto id = compress(identity_mpo(5), 1);
    CHECK(relative_error(dense(id.mpo), eye(32)) < 1e-14);
    CHECK(id.report.total_discarded() == 0.0);

    const auto h = models::ising_mpo(8, 1.0, 1.0);
    auto c = compress(h, 3);
    CHECK(relative_error(dense(c.mpo), dense(h)) < 1e-10);
    CHECK(c.report.total_discarded() == 0.0);

    testing::Rng rng(13);
    auto u = testing::random_mpo(rng, 6, 8);
    auto same = compress(u, 8);
    CHECK(relative_error(dense(same.mpo), dense(u)) < 1e-10);
    CHECK(same.report.total_discarded() == 0.0);
    CHECK_THROWS_AS((void)compress(u, 0), std::invalid_argument);
}

TEST_CASE("to_dense examples") {
    Eigen::MatrixXcd d = dense(models::ising_mpo(2, 1.0, 1.0));
    CHECK(d(0, 0).real() == 2.0);
    CHECK(d(1, 1).real() == 0.0);
    CHECK(d(2, 2).real() == 0.0);
    CHECK(d(3, 3).real() == -2.0);
    for(int k = 0; k < 4; ++k) CHECK(d(k, 3 - k).real() == 1.0);
    CHECK_THROWS_AS((void)to_dense(identity_mpo(15)), std::length_error);
}

TEST_CASE("dense homomorphism for sum and multiply") {
    testing::Rng rng(14);
    for(std::size_t l : {2, 3, 5, 7}) {
        for(int rep = 0; rep < 3; ++rep) {
            auto u = testing::random_mpo(rng, l, 2), v = testing::random_mpo(rng, l, 3);
            CHECK(relative_error(dense(sum(u, v, kUnbounded).mpo), dense(u) + dense(v)) <= 1e-10);
            CHECK(relative_error(dense(multiply(u, v, kUnbounded).mpo), dense(u) * dense(v)) <= 1e-10);
            CHECK(frobenius_norm(sum(u, v, kUnbounded).mpo) <= frobenius_norm(u) + frobenius_norm(v) + 1e-10);
        }
    }
    // L = 10 with model operators
    const auto a = models::ising_mpo(10, 1.0, 0.5), b = models::lmg_mpo(10, 0.3);
    CHECK(relative_error(dense(sum(a, b, kUnbounded).mpo), dense(a) + dense(b)) <= 1e-10);
    CHECK(relative_error(dense(multiply(a, b, kUnbounded).mpo), dense(a) * dense(b)) <= 1e-10);
}

TEST_CASE("compression error shrinks with the cap") {
    testing::Rng rng(15);
    for(int rep = 0; rep < 5; ++rep) {
        auto u = testing::random_mpo(rng, 6, 8);
        const Eigen::MatrixXcd du = dense(u);
        double prev = INFINITY;
        for(std::size_t d : {1, 2, 4, 8}) {
            auto c = compress(u, d);
            CHECK(c.mpo.max_bond_dimension() <= d);
            const double err = (dense(c.mpo) - du).norm();
            CHECK(err <= prev + 1e-10 * du.norm());
            prev = err;
        }
        CHECK(prev <= 1e-10 * du.norm());
    }
}

TEST_CASE("discarded weight is the squared truncation error on one bond") {
    testing::Rng rng(16);
    auto u = testing::random_mpo(rng, 2, 4);
    auto c = compress(u, 2);
    const double err = (dense(c.mpo) - dense(u)).squaredNorm();
    CHECK(c.report.total_discarded() == doctest::Approx(err).epsilon(1e-10));
}

TEST_CASE("fingerprint") {
    const auto a = models::ising_mpo(4, 1.0, 1.0), b = models::ising_mpo(4, 1.0, 1.0);
    CHECK(fingerprint(a) == fingerprint(b));
    CHECK(fingerprint(a) != fingerprint(models::ising_mpo(4, 1.0, 1.0 + 1e-15)));
}
