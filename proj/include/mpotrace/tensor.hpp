#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mpotrace {

using cplx = std::complex<double>;
using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace tensor {

using Shape = std::vector<std::size_t>;

/// Singular values below this fraction of the largest one are exact zeros
/// for every rank decision in the library.
inline constexpr double kRankCutoff = 1e-14;

/*! Dense complex multi-index array in row-major layout.
 *
 * A rank-0 tensor holds a single scalar. All extents are >= 1, so the data
 * length is always the product of the extents.
 */
class DenseTensor {
public:
    DenseTensor();
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, std::vector<cplx> data);

    static DenseTensor scalar(cplx value);
    static DenseTensor from_matrix(const Eigen::Ref<const Eigen::MatrixXcd>& m);

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t rank() const noexcept { return shape_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] std::size_t extent(std::size_t axis) const;

    [[nodiscard]] std::span<cplx> data() noexcept { return data_; }
    [[nodiscard]] std::span<const cplx> data() const noexcept { return data_; }

    template<typename... Idx>
    cplx& operator()(Idx... idx) {
        return data_[offset({static_cast<std::size_t>(idx)...})];
    }
    template<typename... Idx>
    cplx operator()(Idx... idx) const {
        return data_[offset({static_cast<std::size_t>(idx)...})];
    }

    // Reshapes keep the row-major data untouched; the rvalue overload moves it.
    [[nodiscard]] DenseTensor reshaped(Shape shape) const&;
    [[nodiscard]] DenseTensor reshaped(Shape shape) &&;
    [[nodiscard]] DenseTensor permuted(std::span<const std::size_t> axes) const;
    [[nodiscard]] DenseTensor conj() const;

    // Row-major matrix view with `rows` rows and size()/rows columns.
    [[nodiscard]] Eigen::Map<RowMatrix> matrix(std::size_t rows);
    [[nodiscard]] Eigen::Map<const RowMatrix> matrix(std::size_t rows) const;
    [[nodiscard]] Eigen::MatrixXcd to_matrix() const;

    [[nodiscard]] double frobenius_norm() const;
    DenseTensor& operator*=(cplx c);

private:
    std::size_t offset(std::initializer_list<std::size_t> index) const;

    Shape shape_;
    std::vector<cplx> data_;
};

struct AxisPair {
    std::size_t a;
    std::size_t b;
};

/// Sum over the paired axes; free axes of `a` come first, then those of `b`.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b, std::span<const AxisPair> pairs);

inline DenseTensor contract(const DenseTensor& a, const DenseTensor& b, std::initializer_list<AxisPair> pairs) {
    return contract(a, b, std::span<const AxisPair>(pairs.begin(), pairs.size()));
}

struct SvdResult {
    DenseTensor u;                       // rows x k, isometric columns
    std::vector<double> singular_values; // k values, descending
    DenseTensor vh;                      // k x cols, isometric rows
    double truncation_weight = 0.0;      // sum of squared discarded singular values

    [[nodiscard]] std::size_t rank() const noexcept { return singular_values.size(); }
};

/*! Thin SVD of a rank-2 tensor keeping at most `max_rank` triplets.
 *
 * Singular values at or below kRankCutoff * sigma_max are dropped as exact
 * zeros and do not count towards the truncation weight. At least one triplet
 * is always returned (a zero matrix yields a single zero singular value).
 */
SvdResult truncated_svd(const DenseTensor& m, std::size_t max_rank);

struct TridiagonalEigen {
    std::vector<double> values; // ascending
    Eigen::MatrixXd vectors;    // column j belongs to values[j]
};

/// Eigendecomposition of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`. Eigenvectors are signed so that their
/// first non-zero component is positive.
TridiagonalEigen symtridiag_eig(std::span<const double> alpha, std::span<const double> beta);

} // namespace tensor
} // namespace mpotrace
