#pragma once

#include "mpotrace/lanczos.hpp"
#include "mpotrace/models.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mpotrace::thermal {

using lanczos::LanczosRun;
using lanczos::QuadratureRule;

/// Temperatures T_k (strictly increasing, > 0) and the offset dT used for
/// F_T and D_T, which compare T against T + dT.
struct TemperatureGrid {
    std::vector<double> temperatures;
    double delta_t = 0.0;

    /// T_k = tmin + k*step up to tmax (inclusive, within rounding). dT defaults to step.
    static TemperatureGrid uniform(double tmin, double tmax, double step, std::optional<double> delta_t = {});

    [[nodiscard]] std::vector<double> betas() const;
    void validate() const;
};

/// log Z and the normalized moments <H>, <H^2> at one beta.
struct PartitionPoint {
    double beta = 0.0;
    double log_z = 0.0;
    double mean_energy = 0.0;   // F/Z
    double second_moment = 0.0; // G/Z
    double variance = 0.0;      // centered, >= 0
    // S = beta (<H> - x0) + log sum_j w_j exp(-beta (x_j - x0)) with x0 the
    // smallest node; equal to beta F/Z + log Z but free of cancellation at low T.
    double entropy = 0.0;
};

// All sums below use the shift lambda_ref = min node, so every exponential
// has a non-positive argument.
PartitionPoint partition_point(const QuadratureRule& rule, double beta);
double log_partition(const QuadratureRule& rule, double beta);

/// Requires an identity-start run; beta = 0 gives log Z = L ln 2 exactly.
std::vector<PartitionPoint> partition_traces(const LanczosRun& run, std::span<const double> betas);

/// (beta F/Z + log Z) / L, the literal form.
double entropy_density(double log_z, double mean_energy, double beta, std::size_t length);
/// S/L from the shifted form carried by the point.
double entropy_density(const PartitionPoint& p, std::size_t length);
/// beta^2/L * Var(H), from the centered variance.
double specific_heat(const PartitionPoint& p, std::size_t length);
/// beta^2/L * (G/Z - (F/Z)^2), the literal two-moment form.
double specific_heat(double mean_energy, double second_moment, double beta, std::size_t length);

/// Z((b0+b1)/2) / sqrt(Z(b0) Z(b1)); exactly 1 when b0 == b1.
double thermal_fidelity(const QuadratureRule& rule, double beta0, double beta1);
/// || rho(b0) - rho(b1) ||_1 without the 1/2; exactly 0 when b0 == b1.
double trace_distance_thermal(const QuadratureRule& rule, double beta0, double beta1);

/// trace sqrt(B) for a rule built on a positive operator B = A^dagger A.
double trace_norm(const QuadratureRule& rule_on_gram);
/// ||A||_1 by running Lanczos on A^dagger A from the identity.
double trace_norm(const mpo::Mpo& a, const lanczos::LanczosConfig& cfg);

struct SignedRun {
    const LanczosRun* run;
    double sign; // +1 or -1
};

/*! <O>(beta) for O = sum_p sign_p B_p^dagger B_p.
 *
 * Each part run starts from B_p, `z_run` from the identity; all runs must be
 * on the same Hamiltonian. One shift (the smallest node over all runs) is
 * shared so the ratio needs no rescaling.
 */
std::vector<double> expectation(const LanczosRun& z_run, std::span<const SignedRun> parts, std::span<const double> betas);

/// Memoized Lanczos runs of one Hamiltonian, keyed by starting-block label.
class RunPool {
public:
    using Loader = std::function<std::optional<LanczosRun>(const std::string& start_label)>;
    using Saver = std::function<void(const LanczosRun&)>;

    RunPool(mpo::Mpo hamiltonian, lanczos::LanczosConfig cfg, std::string operator_label = {});

    const LanczosRun& get(const models::StartingBlock& start);
    const LanczosRun& identity();

    void set_loader(Loader loader) { loader_ = std::move(loader); }
    void set_saver(Saver saver) { saver_ = std::move(saver); }

    [[nodiscard]] const mpo::Mpo& hamiltonian() const noexcept { return hamiltonian_; }
    [[nodiscard]] std::size_t length() const noexcept { return hamiltonian_.length(); }
    [[nodiscard]] const lanczos::LanczosConfig& config() const noexcept { return cfg_; }

    // Executed Lanczos runs (cache hits excluded) by starting-block kind.
    [[nodiscard]] std::size_t identity_runs() const noexcept { return identity_runs_; }
    [[nodiscard]] std::size_t projector_runs() const noexcept { return projector_runs_; }
    [[nodiscard]] std::size_t cache_hits() const noexcept { return cache_hits_; }

private:
    mpo::Mpo hamiltonian_;
    lanczos::LanczosConfig cfg_;
    std::string label_;
    std::map<std::string, LanczosRun> runs_;
    Loader loader_;
    Saver saver_;
    std::size_t identity_runs_ = 0;
    std::size_t projector_runs_ = 0;
    std::size_t cache_hits_ = 0;
};

enum class Symmetry { none, spin_flip };

struct SitePair {
    std::size_t i; // 1-based, i < j
    std::size_t j;
};

/// True when the Hamiltonian commutes with the global flip prod_i sx_i.
bool commutes_with_spin_flip(const mpo::Mpo& h);

/*! C_zz(i,j) = <sz_i sz_j> - <sz_i><sz_j> at every beta.
 *
 * Symmetry::none uses four projector runs: both zz parts and P0 on each site,
 * with <sz> = 2<P0> - 1. Single-site runs are shared between pairs through the pool.
 * Symmetry::spin_flip uses <sz_i> = 0 and
 * <sz_i sz_j> = 2(<P0_i P0_j> - <P1_i P0_j>), two runs; the Hamiltonian must
 * commute with the global flip or std::invalid_argument is thrown.
 */
std::vector<double> correlation_zz(RunPool& pool, SitePair sites, std::span<const double> betas,
                                   Symmetry symmetry = Symmetry::none);

struct ThermalRecord {
    double temperature = 0.0;
    double beta = 0.0;
    double log_z = 0.0;
    double energy_density = 0.0;
    double entropy = 0.0;        // s = S/L
    double specific_heat = 0.0;  // c
    double fidelity = 0.0;       // F_T(T) = F_T(1/T, 1/(T+dT))
    double trace_distance = 0.0; // D_T(T), same pair
    std::vector<double> correlators;
};

struct ThermalSweepResult {
    std::size_t length = 0;
    std::vector<SitePair> correlator_sites;
    std::vector<ThermalRecord> records;
};

/// All scalar observables at every grid temperature from one identity-start run.
ThermalSweepResult thermal_sweep(const LanczosRun& identity_run, const TemperatureGrid& grid);

} // namespace mpotrace::thermal
