#include "mpotrace/tensor.hpp"

#include "linalg.hpp"
#include "mpotrace/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace mpotrace::tensor {

namespace {

std::size_t volume(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void check_extents(const Shape& shape) {
    for(auto e : shape)
        if(e == 0) throw ShapeError("tensor extents must be >= 1");
}

std::string shape_string(const Shape& shape) {
    std::string s = "(";
    for(std::size_t i = 0; i < shape.size(); ++i) {
        if(i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

} // namespace

DenseTensor::DenseTensor() : data_(1, cplx{0.0}) {}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
    check_extents(shape_);
    data_.assign(volume(shape_), cplx{0.0});
}

DenseTensor::DenseTensor(Shape shape, std::vector<cplx> data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_extents(shape_);
    if(data_.size() != volume(shape_))
        throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " + shape_string(shape_));
}

DenseTensor DenseTensor::scalar(cplx value) { return DenseTensor({}, {value}); }

DenseTensor DenseTensor::from_matrix(const Eigen::Ref<const Eigen::MatrixXcd>& m) {
    DenseTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    t.matrix(t.shape_[0]) = m;
    return t;
}

std::size_t DenseTensor::extent(std::size_t axis) const {
    if(axis >= shape_.size()) throw ShapeError("axis " + std::to_string(axis) + " out of range for rank " + std::to_string(rank()));
    return shape_[axis];
}

std::size_t DenseTensor::offset(std::initializer_list<std::size_t> index) const {
    if(index.size() != shape_.size()) throw ShapeError("index rank does not match tensor rank");
    std::size_t off = 0;
    auto it = index.begin();
    for(std::size_t i = 0; i < shape_.size(); ++i, ++it) {
        if(*it >= shape_[i]) throw ShapeError("index out of range");
        off = off * shape_[i] + *it;
    }
    return off;
}

DenseTensor DenseTensor::reshaped(Shape shape) const& {
    DenseTensor copy = *this;
    return std::move(copy).reshaped(std::move(shape));
}

DenseTensor DenseTensor::reshaped(Shape shape) && {
    check_extents(shape);
    if(volume(shape) != data_.size())
        throw ShapeError("cannot reshape " + shape_string(shape_) + " into " + shape_string(shape));
    shape_ = std::move(shape);
    return std::move(*this);
}

DenseTensor DenseTensor::permuted(std::span<const std::size_t> axes) const {
    const std::size_t r = rank();
    if(axes.size() != r) throw ShapeError("permutation length does not match tensor rank");
    std::vector<bool> seen(r, false);
    for(auto a : axes) {
        if(a >= r || seen[a]) throw ShapeError("invalid axis permutation");
        seen[a] = true;
    }
    if(std::is_sorted(axes.begin(), axes.end())) return *this;

    Shape out_shape(r);
    for(std::size_t i = 0; i < r; ++i) out_shape[i] = shape_[axes[i]];

    // strides of the source, reordered to the output axis order
    std::vector<std::size_t> src_stride(r);
    {
        std::size_t s = 1;
        for(std::size_t i = r; i-- > 0;) {
            src_stride[i] = s;
            s *= shape_[i];
        }
    }
    std::vector<std::size_t> stride(r);
    for(std::size_t i = 0; i < r; ++i) stride[i] = src_stride[axes[i]];

    DenseTensor out(out_shape);
    std::vector<std::size_t> idx(r, 0);
    std::size_t src = 0;
    // innermost output axis is walked in a tight loop
    const std::size_t inner_n = out_shape[r - 1];
    const std::size_t inner_stride = stride[r - 1];
    for(std::size_t dst = 0; dst < out.data_.size(); dst += inner_n) {
        for(std::size_t k = 0; k < inner_n; ++k) out.data_[dst + k] = data_[src + k * inner_stride];
        for(std::size_t ax = r - 1; ax-- > 0;) {
            src += stride[ax];
            if(++idx[ax] < out_shape[ax]) break;
            src -= stride[ax] * out_shape[ax];
            idx[ax] = 0;
        }
    }
    return out;
}

DenseTensor DenseTensor::conj() const {
    DenseTensor out = *this;
    for(auto& x : out.data_) x = std::conj(x);
    return out;
}

Eigen::Map<RowMatrix> DenseTensor::matrix(std::size_t rows) {
    if(rows == 0 || data_.size() % rows != 0) throw ShapeError("matrix view rows do not divide tensor size");
    return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(data_.size() / rows)};
}

Eigen::Map<const RowMatrix> DenseTensor::matrix(std::size_t rows) const {
    if(rows == 0 || data_.size() % rows != 0) throw ShapeError("matrix view rows do not divide tensor size");
    return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(data_.size() / rows)};
}

Eigen::MatrixXcd DenseTensor::to_matrix() const {
    if(rank() != 2) throw ShapeError("to_matrix requires a rank-2 tensor, got rank " + std::to_string(rank()));
    return matrix(shape_[0]);
}

double DenseTensor::frobenius_norm() const {
    double s = 0.0;
    for(const auto& x : data_) s += std::norm(x);
    return std::sqrt(s);
}

DenseTensor& DenseTensor::operator*=(cplx c) {
    for(auto& x : data_) x *= c;
    return *this;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b, std::span<const AxisPair> pairs) {
    std::vector<bool> a_paired(a.rank(), false), b_paired(b.rank(), false);
    for(const auto& p : pairs) {
        if(p.a >= a.rank() || p.b >= b.rank()) throw ShapeError("contracted axis out of range");
        if(a_paired[p.a] || b_paired[p.b]) throw ShapeError("axis contracted twice");
        if(a.extent(p.a) != b.extent(p.b))
            throw ShapeError("extent mismatch on contracted axes: " + std::to_string(a.extent(p.a)) + " vs " +
                             std::to_string(b.extent(p.b)));
        a_paired[p.a] = b_paired[p.b] = true;
    }

    std::vector<std::size_t> a_order, b_order;
    Shape out_shape;
    std::size_t free_a = 1, inner = 1;
    for(std::size_t i = 0; i < a.rank(); ++i)
        if(!a_paired[i]) {
            a_order.push_back(i);
            out_shape.push_back(a.extent(i));
            free_a *= a.extent(i);
        }
    for(const auto& p : pairs) {
        a_order.push_back(p.a);
        b_order.push_back(p.b);
        inner *= a.extent(p.a);
    }
    for(std::size_t i = 0; i < b.rank(); ++i)
        if(!b_paired[i]) {
            b_order.push_back(i);
            out_shape.push_back(b.extent(i));
        }

    const DenseTensor ap = a.permuted(a_order);
    const DenseTensor bp = b.permuted(b_order);
    DenseTensor out(out_shape);
    linalg::multiply_into(ap.matrix(free_a), linalg::Op::none, bp.matrix(inner), out.matrix(free_a));
    return out;
}

SvdResult truncated_svd(const DenseTensor& m, std::size_t max_rank) {
    if(max_rank < 1) throw std::invalid_argument("truncated_svd: max_rank must be >= 1");
    if(m.rank() != 2) throw ShapeError("truncated_svd expects a rank-2 tensor");

    auto f = linalg::svd(m.to_matrix());
    const auto full = static_cast<std::size_t>(f.s.size());
    const double smax = full ? f.s(0) : 0.0;

    std::size_t nonzero = 0;
    while(nonzero < full && f.s(static_cast<Eigen::Index>(nonzero)) > kRankCutoff * smax) ++nonzero;
    const std::size_t keep = std::max<std::size_t>(1, std::min(nonzero, max_rank));

    SvdResult out;
    for(std::size_t i = keep; i < nonzero; ++i) {
        const double s = f.s(static_cast<Eigen::Index>(i));
        out.truncation_weight += s * s;
    }
    const auto k = static_cast<Eigen::Index>(keep);
    out.singular_values.resize(keep);
    for(std::size_t i = 0; i < keep; ++i)
        out.singular_values[i] = i < nonzero ? f.s(static_cast<Eigen::Index>(i)) : 0.0;
    out.u = DenseTensor::from_matrix(f.u.leftCols(k));
    out.vh = DenseTensor::from_matrix(f.vh.topRows(k));
    return out;
}

TridiagonalEigen symtridiag_eig(std::span<const double> alpha, std::span<const double> beta) {
    if(alpha.empty()) throw std::invalid_argument("symtridiag_eig: empty diagonal");
    if(beta.size() + 1 != alpha.size())
        throw ShapeError("symtridiag_eig: off-diagonal must have length K-1");

    TridiagonalEigen out;
    out.values.assign(alpha.begin(), alpha.end());
    out.vectors = linalg::tridiagonal_eigen(out.values, std::vector<double>(beta.begin(), beta.end()));
    for(Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
        for(Eigen::Index i = 0; i < out.vectors.rows(); ++i) {
            const double x = out.vectors(i, j);
            if(x == 0.0) continue;
            if(x < 0.0) out.vectors.col(j) *= -1.0;
            break;
        }
    }
    return out;
}

} // namespace mpotrace::tensor
