#pragma once

#include "mpotrace/models.hpp"
#include "mpotrace/mpo.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mpotrace::lanczos {

using mpo::Mpo;
using models::StartingBlock;

enum class Reorthogonalization { off, full };

enum class Termination { reached_k_max, breakdown, stop_rule };

std::string to_string(Termination t);

/// Gauss quadrature rule induced by T_K: nodes are its eigenvalues, weights
/// beta1^2 times the squared first eigenvector components.
struct QuadratureRule {
    std::vector<double> nodes;   // ascending
    std::vector<double> weights; // >= 0

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
    [[nodiscard]] double total_mass() const;
    [[nodiscard]] double min_node() const { return nodes.front(); }
    [[nodiscard]] double max_node() const { return nodes.back(); }
};

struct StopRule {
    enum class Kind { relative_change, node_range_stagnation };

    Kind kind = Kind::relative_change;
    double tolerance = 1e-10;
    int patience = 3; // consecutive iterations below tolerance
    // Estimate tracked by relative_change. When `log_domain` is set the
    // estimate is log(G) and the relative change is |expm1(dlog)|.
    std::function<double(const QuadratureRule&)> estimate;
    bool log_domain = false;

    /// |Gf(k) - Gf(k-1)| / |Gf(k)| for the quadrature estimate of trace f(A).
    static StopRule relative_change(std::function<double(double)> f, double tolerance, int patience = 3);
    /// Relative change of trace exp(-beta A), evaluated in the log domain.
    static StopRule partition_function(double beta, double tolerance, int patience = 3);
    /// Extreme nodes move by less than tolerance * (node range).
    static StopRule node_range(double tolerance, int patience = 3);
};

struct LanczosConfig {
    std::size_t k_max = 50;
    std::size_t d_max = mpo::kUnbounded;
    double breakdown_tolerance = 1e-12; // relative to beta1
    Reorthogonalization reorthogonalization = Reorthogonalization::off;
    std::vector<StopRule> stop_rules;
    bool keep_basis = false; // store U_1..U_k in the run (diagnostics)

    void validate() const;
};

struct TridiagonalProjection {
    std::vector<double> alphas; // alpha_1..alpha_k
    std::vector<double> betas;  // beta_2..beta_k
    double beta1 = 0.0;
    Termination termination = Termination::reached_k_max;

    [[nodiscard]] std::size_t k() const noexcept { return alphas.size(); }
};

struct IterationLog {
    std::size_t iteration = 0;
    double discarded_weight = 0.0; // summed over all compressions of the step
    std::size_t max_bond_dimension = 1;
};

struct LanczosRun {
    TridiagonalProjection projection;
    QuadratureRule quadrature;
    std::vector<IterationLog> compression_log;
    std::size_t sites = 0;
    std::string operator_label;
    std::string start_label;
    std::uint64_t operator_fingerprint = 0;
    std::vector<Mpo> basis; // only with LanczosConfig::keep_basis
};

/// Quadrature rule of a projection; one eigendecomposition of T_K.
QuadratureRule make_quadrature(const TridiagonalProjection& projection);

/*! Global block Lanczos on the Hilbert-Schmidt space of MPOs.
 *
 * beta_i = |V_{i-1}|, U_i = V_{i-1}/beta_i, V_i = A U_i - beta_i U_{i-1},
 * alpha_i = Re<U_i, V_i>, V_i <- V_i - alpha_i U_i, every sum and product
 * capped at d_max. Stops on beta_i < tol * beta_1, at k_max, or when a stop
 * rule fires.
 */
LanczosRun run_lanczos(const Mpo& a, const StartingBlock& start, const LanczosConfig& cfg,
                       std::string operator_label = {});

/// Sum_j w_j f(x_j). Throws DomainError if f is not finite at a node.
double evaluate(const LanczosRun& run, const std::function<double(double)>& f);
double evaluate(const QuadratureRule& rule, const std::function<double(double)>& f);

std::vector<double> evaluate_many(const LanczosRun& run, std::span<const std::function<double(double)>> fs);

} // namespace mpotrace::lanczos
