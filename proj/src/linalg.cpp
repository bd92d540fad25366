#include "linalg.hpp"

#include "mpotrace/errors.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cblas.h>

#include <algorithm>
#include <string>

namespace mpotrace::linalg {

namespace {

lapack_complex_double* as_lapack(std::complex<double>* p) { return p; }

} // namespace

Svd svd(Eigen::MatrixXcd a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(m, n);
    Svd out;
    out.u.resize(m, k);
    out.s.resize(k);
    out.vh.resize(k, n);
    if(k == 0) return out;

    // zgesvd rather than zgesdd: the divide-and-conquer driver goes through
    // real dgemm, which some OpenBLAS kernels get wrong for large blocks.
    std::vector<double> superb(static_cast<std::size_t>(k));
    const lapack_int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, as_lapack(a.data()), m, out.s.data(),
                                           as_lapack(out.u.data()), m, as_lapack(out.vh.data()), k, superb.data());
    if(info != 0) throw NumericalError("SVD failed to converge (LAPACK info " + std::to_string(info) + ")");
    return out;
}

Qr thin_qr(Eigen::MatrixXcd a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(m, n);
    Qr out;
    if(k == 0) {
        out.q.resize(m, 0);
        out.r.resize(0, n);
        return out;
    }
    Eigen::VectorXcd tau(k);
    lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, m, n, as_lapack(a.data()), m, as_lapack(tau.data()));
    if(info != 0) throw NumericalError("QR factorization failed (LAPACK info " + std::to_string(info) + ")");

    out.r = a.topRows(k).triangularView<Eigen::Upper>();
    out.q = a.leftCols(k);
    info = LAPACKE_zungqr(LAPACK_COL_MAJOR, m, k, k, as_lapack(out.q.data()), m, as_lapack(tau.data()));
    if(info != 0) throw NumericalError("QR factorization failed (LAPACK info " + std::to_string(info) + ")");
    return out;
}

void multiply_into(const Eigen::Ref<const RowMatrix>& a, Op op_a, const Eigen::Ref<const RowMatrix>& b,
                   Eigen::Ref<RowMatrix> c) {
    const bool adj = op_a == Op::adjoint;
    const Eigen::Index m = adj ? a.cols() : a.rows();
    const Eigen::Index k = adj ? a.rows() : a.cols();
    if(k != b.rows() || c.rows() != m || c.cols() != b.cols()) throw ShapeError("multiply_into: shape mismatch");
    if(m == 0 || b.cols() == 0) return;
    if(k == 0) {
        c.setZero();
        return;
    }
    const std::complex<double> one(1.0), zero(0.0);
    cblas_zgemm(CblasRowMajor, adj ? CblasConjTrans : CblasNoTrans, CblasNoTrans, static_cast<blasint>(m),
                static_cast<blasint>(b.cols()), static_cast<blasint>(k), &one, a.data(), static_cast<blasint>(a.outerStride()),
                b.data(), static_cast<blasint>(b.outerStride()), &zero, c.data(), static_cast<blasint>(c.outerStride()));
}

RowMatrix product(const Eigen::Ref<const RowMatrix>& a, const Eigen::Ref<const RowMatrix>& b, Op op_a) {
    RowMatrix c(op_a == Op::adjoint ? a.cols() : a.rows(), b.cols());
    multiply_into(a, op_a, b, c);
    return c;
}

Eigen::MatrixXd tridiagonal_eigen(std::vector<double>& diag, std::vector<double> offdiag) {
    const lapack_int n = static_cast<lapack_int>(diag.size());
    Eigen::MatrixXd z(n, n);
    if(n == 0) return z;
    offdiag.resize(static_cast<std::size_t>(std::max<lapack_int>(n - 1, 1)));
    lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, diag.data(), offdiag.data(), z.data(), n);
    if(info != 0) throw NumericalError("tridiagonal eigensolver failed (LAPACK info " + std::to_string(info) + ")");
    return z;
}

} // namespace mpotrace::linalg
