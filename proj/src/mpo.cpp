#include "mpotrace/mpo.hpp"

#include "linalg.hpp"
#include "mpotrace/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace mpotrace::mpo {

using tensor::Shape;

namespace {

void require_same_length(const Mpo& u, const Mpo& v, const char* op) {
    if(u.length() != v.length())
        throw ShapeError(std::string(op) + ": length mismatch (" + std::to_string(u.length()) + " vs " +
                         std::to_string(v.length()) + ")");
}

// Copies `src` (l, p, q, r) into `dst` at bond offsets (lo, ro).
void place_block(DenseTensor& dst, const DenseTensor& src, std::size_t lo, std::size_t ro) {
    const auto& s = src.shape();
    const std::size_t dst_r = dst.extent(3);
    const std::size_t pq = s[1] * s[2];
    auto out = dst.data();
    auto in = src.data();
    for(std::size_t l = 0; l < s[0]; ++l)
        for(std::size_t k = 0; k < pq; ++k)
            for(std::size_t r = 0; r < s[3]; ++r)
                out[((l + lo) * pq + k) * dst_r + r + ro] = in[(l * pq + k) * s[3] + r];
}

} // namespace

Mpo::Mpo(std::vector<DenseTensor> sites) : sites_(std::move(sites)) {
    if(sites_.empty()) throw ShapeError("an MPO needs at least one site");
    for(std::size_t i = 0; i < sites_.size(); ++i) {
        const auto& w = sites_[i];
        if(w.rank() != 4) throw ShapeError("MPO site " + std::to_string(i) + " is not a rank-4 tensor");
        if(w.extent(1) != w.extent(2)) throw ShapeError("MPO site " + std::to_string(i) + " has non-square physical indices");
        if(i > 0 && sites_[i - 1].extent(3) != w.extent(0))
            throw ShapeError("bond mismatch between sites " + std::to_string(i - 1) + " and " + std::to_string(i));
    }
    if(sites_.front().extent(0) != 1 || sites_.back().extent(3) != 1)
        throw ShapeError("MPO boundary bonds must have extent 1");
}

std::vector<std::size_t> Mpo::bond_dimensions() const {
    std::vector<std::size_t> dims;
    dims.reserve(sites_.size() - 1);
    for(std::size_t i = 0; i + 1 < sites_.size(); ++i) dims.push_back(sites_[i].extent(3));
    return dims;
}

std::size_t Mpo::max_bond_dimension() const {
    std::size_t d = 1;
    for(std::size_t i = 0; i + 1 < sites_.size(); ++i) d = std::max(d, sites_[i].extent(3));
    return d;
}

double CompressionReport::total_discarded() const {
    return std::accumulate(discarded_weight.begin(), discarded_weight.end(), 0.0);
}

Mpo product_mpo(std::span<const Eigen::MatrixXcd> local_ops) {
    std::vector<DenseTensor> sites;
    sites.reserve(local_ops.size());
    for(const auto& op : local_ops) {
        if(op.rows() != op.cols()) throw ShapeError("local operators must be square");
        const auto d = static_cast<std::size_t>(op.rows());
        sites.push_back(DenseTensor::from_matrix(op).reshaped({1, d, d, 1}));
    }
    return Mpo(std::move(sites));
}

Mpo identity_mpo(std::size_t length, std::size_t phys_dim) {
    if(length == 0) throw std::invalid_argument("identity_mpo: length must be >= 1");
    const auto d = static_cast<Eigen::Index>(phys_dim);
    std::vector<Eigen::MatrixXcd> ops(length, Eigen::MatrixXcd::Identity(d, d));
    return product_mpo(ops);
}

Mpo zero_mpo(std::size_t length, std::size_t phys_dim) {
    if(length == 0) throw std::invalid_argument("zero_mpo: length must be >= 1");
    std::vector<DenseTensor> sites(length, DenseTensor({1, phys_dim, phys_dim, 1}));
    return Mpo(std::move(sites));
}

cplx inner_product(const Mpo& u, const Mpo& v) {
    require_same_length(u, v, "inner_product");
    RowMatrix env = RowMatrix::Ones(1, 1);
    for(std::size_t i = 0; i < u.length(); ++i) {
        const auto& a = u.site(i);
        const auto& b = v.site(i);
        if(a.extent(1) != b.extent(1)) throw ShapeError("inner_product: physical dimension mismatch");
        const std::size_t dd = a.extent(1) * a.extent(2);
        // env (Da x Db) * b (Db x dd*Db') viewed as (Da*dd x Db'), then conj(a)^T from the left
        RowMatrix tmp = linalg::product(env, b.matrix(b.extent(0)));
        Eigen::Map<const RowMatrix> tmp2(tmp.data(), static_cast<Eigen::Index>(a.extent(0) * dd),
                                         static_cast<Eigen::Index>(b.extent(3)));
        env = linalg::product(a.matrix(a.extent(0) * dd), tmp2, linalg::Op::adjoint);
    }
    return env(0, 0);
}

double frobenius_norm(const Mpo& u) {
    return std::sqrt(std::max(0.0, inner_product(u, u).real()));
}

cplx trace(const Mpo& u) {
    RowMatrix env = RowMatrix::Ones(1, 1);
    for(const auto& w : u.sites()) {
        const std::size_t dl = w.extent(0), d = w.extent(1), dr = w.extent(3);
        RowMatrix local = RowMatrix::Zero(static_cast<Eigen::Index>(dl), static_cast<Eigen::Index>(dr));
        for(std::size_t l = 0; l < dl; ++l)
            for(std::size_t s = 0; s < d; ++s)
                for(std::size_t r = 0; r < dr; ++r) local(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r)) += w(l, s, s, r);
        env = env * local;
    }
    return env(0, 0);
}

Mpo scalar_multiply(cplx c, const Mpo& u) {
    std::vector<DenseTensor> sites(u.sites().begin(), u.sites().end());
    sites.front() *= c;
    return Mpo(std::move(sites));
}

Mpo adjoint(const Mpo& u) {
    static constexpr std::size_t swap_phys[] = {0, 2, 1, 3};
    std::vector<DenseTensor> sites;
    sites.reserve(u.length());
    for(const auto& w : u.sites()) sites.push_back(w.permuted(swap_phys).conj());
    return Mpo(std::move(sites));
}

Mpo direct_sum(const Mpo& u, const Mpo& v) {
    require_same_length(u, v, "sum");
    const std::size_t n = u.length();
    std::vector<DenseTensor> sites;
    sites.reserve(n);
    for(std::size_t i = 0; i < n; ++i) {
        const auto& a = u.site(i);
        const auto& b = v.site(i);
        if(a.extent(1) != b.extent(1)) throw ShapeError("sum: physical dimension mismatch");
        const bool first = i == 0, last = i + 1 == n;
        const std::size_t left = first ? 1 : a.extent(0) + b.extent(0);
        const std::size_t right = last ? 1 : a.extent(3) + b.extent(3);
        if(first && last) {
            DenseTensor w = a;
            for(std::size_t k = 0; k < w.size(); ++k) w.data()[k] += b.data()[k];
            sites.push_back(std::move(w));
            continue;
        }
        DenseTensor w({left, a.extent(1), a.extent(2), right});
        place_block(w, a, 0, 0);
        place_block(w, b, first ? 0 : a.extent(0), last ? 0 : a.extent(3));
        sites.push_back(std::move(w));
    }
    return Mpo(std::move(sites));
}

Mpo operator_product(const Mpo& a, const Mpo& u) {
    require_same_length(a, u, "multiply");
    static constexpr std::size_t order[] = {0, 3, 1, 4, 2, 5};
    std::vector<DenseTensor> sites;
    sites.reserve(a.length());
    for(std::size_t i = 0; i < a.length(); ++i) {
        const auto& wa = a.site(i);
        const auto& wu = u.site(i);
        // (al, s, k, ar) x (ul, k, t, ur) -> (al, s, ar, ul, t, ur)
        auto w = tensor::contract(wa, wu, {{2, 1}}).permuted(order);
        sites.push_back(std::move(w).reshaped(
            {wa.extent(0) * wu.extent(0), wa.extent(1), wu.extent(2), wa.extent(3) * wu.extent(3)}));
    }
    return Mpo(std::move(sites));
}

Compressed compress(const Mpo& u, std::size_t d_max) {
    if(d_max < 1) throw std::invalid_argument("compress: d_max must be >= 1");
    const std::size_t n = u.length();
    std::vector<DenseTensor> sites(u.sites().begin(), u.sites().end());
    CompressionReport report;
    report.discarded_weight.assign(n - 1, 0.0);
    if(n == 1) return {Mpo(std::move(sites)), std::move(report)};

    // left-orthonormalize sites 0..n-2
    for(std::size_t i = 0; i + 1 < n; ++i) {
        auto& w = sites[i];
        const Shape s = w.shape();
        const std::size_t rows = s[0] * s[1] * s[2];
        auto qr = linalg::thin_qr(w.matrix(rows));
        const auto k = static_cast<std::size_t>(qr.q.cols());
        w = DenseTensor::from_matrix(qr.q).reshaped({s[0], s[1], s[2], k});

        auto& next = sites[i + 1];
        const Shape ns = next.shape();
        DenseTensor merged({k, ns[1], ns[2], ns[3]});
        const RowMatrix r = qr.r;
        linalg::multiply_into(r, linalg::Op::none, next.matrix(ns[0]), merged.matrix(k));
        next = std::move(merged);
    }

    // right-to-left truncation; left environment is an isometry at every cut
    for(std::size_t i = n - 1; i > 0; --i) {
        auto& w = sites[i];
        const Shape s = w.shape();
        auto svd = tensor::truncated_svd(DenseTensor::from_matrix(w.matrix(s[0])), d_max);
        const std::size_t k = svd.rank();
        w = std::move(svd.vh).reshaped({k, s[1], s[2], s[3]});
        report.discarded_weight[i - 1] = svd.truncation_weight;

        RowMatrix us = svd.u.matrix(s[0]);
        for(std::size_t c = 0; c < k; ++c) us.col(static_cast<Eigen::Index>(c)) *= svd.singular_values[c];
        auto& prev = sites[i - 1];
        const Shape ps = prev.shape();
        DenseTensor merged({ps[0], ps[1], ps[2], k});
        linalg::multiply_into(prev.matrix(ps[0] * ps[1] * ps[2]), linalg::Op::none, us, merged.matrix(ps[0] * ps[1] * ps[2]));
        prev = std::move(merged);
    }

    Mpo out(std::move(sites));
    report.max_bond_dimension = out.max_bond_dimension();
    return {std::move(out), std::move(report)};
}

Compressed sum(const Mpo& u, const Mpo& v, std::size_t d_max) {
    return compress(direct_sum(u, v), d_max);
}

Compressed multiply(const Mpo& a, const Mpo& u, std::size_t d_max) {
    return compress(operator_product(a, u), d_max);
}

DenseTensor to_dense(const Mpo& u, std::size_t max_length) {
    if(u.length() > max_length)
        throw std::length_error("to_dense: chain length " + std::to_string(u.length()) + " exceeds guard " +
                                std::to_string(max_length));
    static constexpr std::size_t order[] = {0, 2, 1, 3, 4};
    const auto& w0 = u.site(0);
    DenseTensor acc = w0.reshaped({w0.extent(1), w0.extent(2), w0.extent(3)});
    for(std::size_t i = 1; i < u.length(); ++i) {
        const auto& w = u.site(i);
        // (r, c, D) x (D, s, t, D') -> (r, c, s, t, D') -> (r, s, c, t, D')
        auto next = tensor::contract(acc, w, {{2, 0}}).permuted(order);
        const Shape& ns = next.shape();
        acc = std::move(next).reshaped({ns[0] * ns[1], ns[2] * ns[3], ns[4]});
    }
    const std::size_t dim = acc.extent(0);
    return std::move(acc).reshaped({dim, dim});
}

std::uint64_t fingerprint(const Mpo& u) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t x) {
        for(int b = 0; b < 8; ++b) {
            h ^= (x >> (8 * b)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    mix(u.length());
    for(const auto& w : u.sites()) {
        for(auto e : w.shape()) mix(e);
        for(const auto& z : w.data()) {
            mix(std::bit_cast<std::uint64_t>(z.real()));
            mix(std::bit_cast<std::uint64_t>(z.imag()));
        }
    }
    return h;
}

} // namespace mpotrace::mpo
