#pragma once

#include "mpotrace/tensor.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace mpotrace::mpo {

using tensor::DenseTensor;

/// Default largest chain length that to_dense() will materialize.
inline constexpr std::size_t kDenseSiteGuard = 14;

/// Bond-dimension cap meaning "never truncate".
inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/*! Matrix product operator on a chain of L sites.
 *
 * Site tensors have indices (left bond, physical out, physical in, right bond);
 * the outer bonds have extent 1. Element (s, t) of the physical block is
 * <s| O |t>. Sites are stored 0-based; physics-facing builders in `models`
 * take 1-based site labels.
 *
 *        1
 *        |
 *    0---W---3
 *        |
 *        2
 */
class Mpo {
public:
    explicit Mpo(std::vector<DenseTensor> sites);

    [[nodiscard]] std::size_t length() const noexcept { return sites_.size(); }
    [[nodiscard]] const DenseTensor& site(std::size_t i) const { return sites_.at(i); }
    [[nodiscard]] std::span<const DenseTensor> sites() const noexcept { return sites_; }
    [[nodiscard]] std::size_t physical_dim(std::size_t i) const { return sites_.at(i).extent(1); }

    /// Extents of the L-1 internal bonds.
    [[nodiscard]] std::vector<std::size_t> bond_dimensions() const;
    /// Largest internal bond; 1 for a single site.
    [[nodiscard]] std::size_t max_bond_dimension() const;

private:
    std::vector<DenseTensor> sites_;
};

struct CompressionReport {
    std::vector<double> discarded_weight; // per internal bond
    std::size_t max_bond_dimension = 1;

    [[nodiscard]] double total_discarded() const;
};

struct Compressed {
    Mpo mpo;
    CompressionReport report;
};

Mpo identity_mpo(std::size_t length, std::size_t phys_dim = 2);
Mpo zero_mpo(std::size_t length, std::size_t phys_dim = 2);

/// Bond-dimension-1 product operator, one square matrix per site.
Mpo product_mpo(std::span<const Eigen::MatrixXcd> local_ops);

/// Hilbert-Schmidt inner product trace(U^dagger V) by transfer contraction.
cplx inner_product(const Mpo& u, const Mpo& v);
double frobenius_norm(const Mpo& u);
cplx trace(const Mpo& u);

Mpo scalar_multiply(cplx c, const Mpo& u);
Mpo adjoint(const Mpo& u);

// Exact constructions; bond dimensions add (direct_sum) or multiply
// (operator_product). No compression.
Mpo direct_sum(const Mpo& u, const Mpo& v);
Mpo operator_product(const Mpo& a, const Mpo& u);

/*! Bond-wise optimal truncation to at most `d_max`.
 *
 * Left-to-right QR sweep followed by a right-to-left SVD sweep. Numerically
 * zero singular values (tensor::kRankCutoff) are always removed, so every bond
 * ends at its exact rank unless that exceeds `d_max`. Only singular values
 * dropped by the cap contribute to the discarded weight. The result is left
 * with sites 1..L-1 right-orthonormal and the norm carried by site 0.
 */
Compressed compress(const Mpo& u, std::size_t d_max);

Compressed sum(const Mpo& u, const Mpo& v, std::size_t d_max);
Compressed multiply(const Mpo& a, const Mpo& u, std::size_t d_max);

/// Full 2^L x 2^L (d^L in general) matrix; site 0 is the most significant digit.
DenseTensor to_dense(const Mpo& u, std::size_t max_length = kDenseSiteGuard);

/// FNV-1a hash over shapes and raw data. Equal operators in different
/// gauges hash differently.
std::uint64_t fingerprint(const Mpo& u);

} // namespace mpotrace::mpo
