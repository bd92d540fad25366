#pragma once

#include "mpotrace/mpo.hpp"

#include <Eigen/Dense>

#include <random>

namespace mpotrace::testing {

using Rng = std::mt19937_64;

/// Random complex MPO with every internal bond equal to `bond` (clipped to
/// the exact rank near the edges is not attempted).
mpo::Mpo random_mpo(Rng& rng, std::size_t length, std::size_t bond);

/// (A + A^dagger)/2 for a random A of bond ceil(max_bond/2), so the result
/// has bond <= max_bond. Scaled to |H|_F = 2^{L/2}, i.e. O(1) spectrum.
mpo::Mpo random_hermitian_mpo(Rng& rng, std::size_t length, std::size_t max_bond);

Eigen::MatrixXcd dense(const mpo::Mpo& u);

/// |a - b|_F / |b|_F, or |a|_F when b vanishes.
double relative_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
double relative_error(double a, double b);

/// Kronecker product a (x) b; a acts on the more significant digit.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

} // namespace mpotrace::testing
