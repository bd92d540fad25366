#include "mpotrace/oracle.hpp"

#include "mpotrace/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mpotrace::oracle {

namespace {

// Boltzmann probabilities p_n = exp(-beta lambda_n) / Z and log Z.
struct Boltzmann {
    Eigen::VectorXd p;
    double log_z;
};

Boltzmann boltzmann(const DenseSpectrum& spec, double beta) {
    const double e0 = spec.values.minCoeff();
    Eigen::VectorXd p = (-beta * (spec.values.array() - e0)).exp().matrix();
    const double s = p.sum();
    p /= s;
    return {std::move(p), -beta * e0 + std::log(s)};
}

// +1 if the 1-based site holds |0> in computational basis state x.
double sz_sign(std::size_t x, std::size_t sites, std::size_t site) {
    return ((x >> (sites - site)) & 1u) ? -1.0 : 1.0;
}

} // namespace

DenseSpectrum exact_spectrum(const mpo::Mpo& h, bool with_vectors, std::size_t max_length) {
    if(h.length() > max_length)
        throw std::length_error("exact_spectrum: L=" + std::to_string(h.length()) + " exceeds the guard " +
                                std::to_string(max_length));
    const Eigen::MatrixXcd m = mpo::to_dense(h, max_length).to_matrix();
    const double scale = std::max(m.norm(), 1.0);
    if((m - m.adjoint()).norm() > 1e-8 * scale) throw std::invalid_argument("exact_spectrum: matrix is not Hermitian");
    const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if(es.info() != Eigen::Success) throw NumericalError("exact_spectrum: eigensolver failed");
    DenseSpectrum spec;
    spec.sites = h.length();
    spec.values = es.eigenvalues();
    if(with_vectors) spec.vectors = es.eigenvectors();
    return spec;
}

double exact_trace(const DenseSpectrum& spec, const std::function<double(double)>& f) {
    double s = 0.0;
    for(Eigen::Index n = 0; n < spec.values.size(); ++n) s += f(spec.values(n));
    return s;
}

thermal::PartitionPoint exact_partition(const DenseSpectrum& spec, double beta) {
    const auto b = boltzmann(spec, beta);
    thermal::PartitionPoint p;
    p.beta = beta;
    p.log_z = b.log_z;
    p.mean_energy = b.p.dot(spec.values);
    p.second_moment = b.p.dot(spec.values.cwiseAbs2());
    p.variance = b.p.dot((spec.values.array() - p.mean_energy).square().matrix());
    p.entropy = 0.0;
    for(Eigen::Index n = 0; n < b.p.size(); ++n)
        if(b.p(n) > 0.0) p.entropy -= b.p(n) * std::log(b.p(n));
    return p;
}

double exact_fidelity(const DenseSpectrum& spec, double beta0, double beta1) {
    const auto p0 = boltzmann(spec, beta0), p1 = boltzmann(spec, beta1);
    return p0.p.cwiseProduct(p1.p).cwiseSqrt().sum();
}

double exact_trace_distance(const DenseSpectrum& spec, double beta0, double beta1) {
    return (boltzmann(spec, beta0).p - boltzmann(spec, beta1).p).cwiseAbs().sum();
}

std::vector<double> exact_correlation_zz(const DenseSpectrum& spec, thermal::SitePair sites, std::span<const double> betas) {
    if(spec.vectors.size() == 0) throw std::invalid_argument("exact_correlation_zz: spectrum has no eigenvectors");
    if(sites.i < 1 || sites.j > spec.sites || sites.i >= sites.j)
        throw std::out_of_range("exact_correlation_zz: need 1 <= i < j <= L");
    const auto dim = static_cast<std::size_t>(spec.values.size());
    Eigen::VectorXd si(dim), sj(dim);
    for(std::size_t x = 0; x < dim; ++x) {
        si(static_cast<Eigen::Index>(x)) = sz_sign(x, spec.sites, sites.i);
        sj(static_cast<Eigen::Index>(x)) = sz_sign(x, spec.sites, sites.j);
    }
    // Diagonal observables: <n| O |n> = sum_x |v_n(x)|^2 O(x).
    const Eigen::MatrixXd prob = spec.vectors.cwiseAbs2();
    const Eigen::VectorXd mi = prob.transpose() * si;
    const Eigen::VectorXd mj = prob.transpose() * sj;
    const Eigen::VectorXd mij = prob.transpose() * si.cwiseProduct(sj);
    std::vector<double> out;
    out.reserve(betas.size());
    for(double b : betas) {
        const auto w = boltzmann(spec, b);
        out.push_back(w.p.dot(mij) - w.p.dot(mi) * w.p.dot(mj));
    }
    return out;
}

thermal::ThermalSweepResult exact_observables(const DenseSpectrum& spec, const thermal::TemperatureGrid& grid,
                                              std::span<const thermal::SitePair> pairs) {
    grid.validate();
    thermal::ThermalSweepResult result;
    result.length = spec.sites;
    result.correlator_sites.assign(pairs.begin(), pairs.end());
    const auto length = static_cast<double>(spec.sites);
    const auto betas = grid.betas();
    std::vector<std::vector<double>> czz;
    for(const auto& pr : pairs) czz.push_back(exact_correlation_zz(spec, pr, betas));
    for(std::size_t k = 0; k < betas.size(); ++k) {
        thermal::ThermalRecord r;
        r.temperature = grid.temperatures[k];
        r.beta = betas[k];
        const auto p = exact_partition(spec, r.beta);
        r.log_z = p.log_z;
        r.energy_density = p.mean_energy / length;
        r.entropy = p.entropy / length;
        r.specific_heat = r.beta * r.beta * p.variance / length;
        const double beta1 = 1.0 / (r.temperature + grid.delta_t);
        r.fidelity = exact_fidelity(spec, r.beta, beta1);
        r.trace_distance = exact_trace_distance(spec, r.beta, beta1);
        for(const auto& c : czz) r.correlators.push_back(c[k]);
        result.records.push_back(std::move(r));
    }
    return result;
}

} // namespace mpotrace::oracle
