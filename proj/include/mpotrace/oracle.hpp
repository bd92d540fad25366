#pragma once

#include "mpotrace/mpo.hpp"
#include "mpotrace/thermal.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>

// Exact-diagonalization reference for small chains. Shares no numerical code
// with the thermal module beyond the dense MPO contraction.

namespace mpotrace::oracle {

inline constexpr std::size_t kDefaultMaxLength = 12;

struct DenseSpectrum {
    std::size_t sites = 0;
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // columns; empty unless requested
};

DenseSpectrum exact_spectrum(const mpo::Mpo& h, bool with_vectors = false, std::size_t max_length = kDefaultMaxLength);

/// sum_n f(lambda_n)
double exact_trace(const DenseSpectrum& spec, const std::function<double(double)>& f);

/// log Z, <H>, <H^2> and Var(H) from the eigenvalues.
thermal::PartitionPoint exact_partition(const DenseSpectrum& spec, double beta);

double exact_fidelity(const DenseSpectrum& spec, double beta0, double beta1);
double exact_trace_distance(const DenseSpectrum& spec, double beta0, double beta1);

/// Thermal <sz_i> and <sz_j>, <sz_i sz_j> combined into C_zz; needs eigenvectors.
std::vector<double> exact_correlation_zz(const DenseSpectrum& spec, thermal::SitePair sites, std::span<const double> betas);

/// Every sweep observable on the grid, plus C_zz for each pair (needs eigenvectors if pairs is non-empty).
thermal::ThermalSweepResult exact_observables(const DenseSpectrum& spec, const thermal::TemperatureGrid& grid,
                                              std::span<const thermal::SitePair> pairs = {});

} // namespace mpotrace::oracle
