#pragma once

// Thin wrappers over LAPACK for the dense factorizations used by the tensor
// and mpo modules. Inputs are column-major Eigen matrices.

#include "mpotrace/tensor.hpp"

#include <Eigen/Core>

#include <vector>

namespace mpotrace::linalg {

struct Svd {
    Eigen::MatrixXcd u;  // m x k
    Eigen::VectorXd s;   // k, descending
    Eigen::MatrixXcd vh; // k x n
};

// k = min(m, n)
Svd svd(Eigen::MatrixXcd a);

struct Qr {
    Eigen::MatrixXcd q; // m x k, orthonormal columns
    Eigen::MatrixXcd r; // k x n, upper trapezoidal
};

Qr thin_qr(Eigen::MatrixXcd a);

enum class Op { none, adjoint };

// c = op(a) * b through zgemm. Row-major operands with unit inner stride.
void multiply_into(const Eigen::Ref<const RowMatrix>& a, Op op_a, const Eigen::Ref<const RowMatrix>& b,
                   Eigen::Ref<RowMatrix> c);
RowMatrix product(const Eigen::Ref<const RowMatrix>& a, const Eigen::Ref<const RowMatrix>& b, Op op_a = Op::none);

// Symmetric tridiagonal eigenproblem; `diag` is overwritten by ascending
// eigenvalues, `offdiag` is destroyed.
Eigen::MatrixXd tridiagonal_eigen(std::vector<double>& diag, std::vector<double> offdiag);

} // namespace mpotrace::linalg
