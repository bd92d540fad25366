#include "support.hpp"

#include <cmath>

namespace mpotrace::testing {

mpo::Mpo random_mpo(Rng& rng, std::size_t length, std::size_t bond) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<tensor::DenseTensor> sites;
    for(std::size_t i = 0; i < length; ++i) {
        const std::size_t dl = i == 0 ? 1 : bond, dr = i + 1 == length ? 1 : bond;
        tensor::DenseTensor w({dl, 2, 2, dr});
        for(auto& x : w.data()) x = cplx(n(rng), n(rng));
        sites.push_back(std::move(w));
    }
    return mpo::Mpo(std::move(sites));
}

mpo::Mpo random_hermitian_mpo(Rng& rng, std::size_t length, std::size_t max_bond) {
    const auto a = random_mpo(rng, length, std::max<std::size_t>(1, max_bond / 2));
    auto h = mpo::sum(a, mpo::adjoint(a), mpo::kUnbounded).mpo;
    const double target = std::pow(2.0, 0.5 * static_cast<double>(length));
    return mpo::scalar_multiply(target / mpo::frobenius_norm(h), h);
}

Eigen::MatrixXcd dense(const mpo::Mpo& u) { return mpo::to_dense(u).to_matrix(); }

double relative_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const double nb = b.norm();
    return nb == 0.0 ? a.norm() : (a - b).norm() / nb;
}

double relative_error(double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
    for(Eigen::Index i = 0; i < a.rows(); ++i)
        for(Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
}

} // namespace mpotrace::testing
