#include "mpotrace/lanczos.hpp"

#include "mpotrace/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mpotrace::lanczos {

namespace {

// Hermiticity spot check is done only when the check itself is cheap.
constexpr std::size_t kHermitianCheckBond = 32;

void check_hermitian(const Mpo& a) {
    if(a.max_bond_dimension() > kHermitianCheckBond) return;
    const double norm = mpo::frobenius_norm(a);
    const auto diff = mpo::sum(a, mpo::scalar_multiply(-1.0, mpo::adjoint(a)), mpo::kUnbounded);
    if(mpo::frobenius_norm(diff.mpo) > 1e-8 * std::max(norm, 1.0))
        throw std::invalid_argument("run_lanczos: operator is not Hermitian");
}

void check_finite(double x, const char* what, std::size_t i) {
    if(!std::isfinite(x)) {
        std::ostringstream os;
        os << "non-finite " << what << " at Lanczos step " << i;
        throw NumericalError(os.str());
    }
}

struct RuleState {
    std::optional<double> previous;
    std::optional<std::pair<double, double>> previous_range;
    int streak = 0;
};

bool rule_fires(const StopRule& rule, RuleState& state, const QuadratureRule& q) {
    double change = std::numeric_limits<double>::infinity();
    if(rule.kind == StopRule::Kind::relative_change) {
        const double e = rule.estimate(q);
        if(state.previous) {
            if(rule.log_domain)
                change = std::abs(std::expm1(*state.previous - e));
            else if(e != 0.0)
                change = std::abs(e - *state.previous) / std::abs(e);
            else if(*state.previous == 0.0)
                change = 0.0;
        }
        state.previous = e;
    } else {
        const std::pair<double, double> range{q.min_node(), q.max_node()};
        if(state.previous_range && range.second > range.first)
            change = (std::abs(range.first - state.previous_range->first) +
                      std::abs(range.second - state.previous_range->second)) /
                     (range.second - range.first);
        state.previous_range = range;
    }
    state.streak = change < rule.tolerance ? state.streak + 1 : 0;
    return state.streak >= rule.patience;
}

} // namespace

std::string to_string(Termination t) {
    switch(t) {
        case Termination::reached_k_max: return "reached-k-max";
        case Termination::breakdown: return "breakdown";
        case Termination::stop_rule: return "stop-rule";
    }
    return "unknown";
}

double QuadratureRule::total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

StopRule StopRule::relative_change(std::function<double(double)> f, double tolerance, int patience) {
    StopRule r;
    r.kind = Kind::relative_change;
    r.tolerance = tolerance;
    r.patience = patience;
    r.estimate = [f = std::move(f)](const QuadratureRule& q) { return evaluate(q, f); };
    return r;
}

StopRule StopRule::partition_function(double beta, double tolerance, int patience) {
    StopRule r;
    r.kind = Kind::relative_change;
    r.tolerance = tolerance;
    r.patience = patience;
    r.log_domain = true;
    r.estimate = [beta](const QuadratureRule& q) {
        const double shift = q.min_node();
        double s = 0.0;
        for(std::size_t j = 0; j < q.size(); ++j) s += q.weights[j] * std::exp(-beta * (q.nodes[j] - shift));
        return -beta * shift + std::log(s);
    };
    return r;
}

StopRule StopRule::node_range(double tolerance, int patience) {
    StopRule r;
    r.kind = Kind::node_range_stagnation;
    r.tolerance = tolerance;
    r.patience = patience;
    return r;
}

void LanczosConfig::validate() const {
    if(k_max < 1) throw std::invalid_argument("LanczosConfig: k_max must be >= 1");
    if(d_max < 1) throw std::invalid_argument("LanczosConfig: d_max must be >= 1");
    if(!(breakdown_tolerance > 0.0 && breakdown_tolerance < 1.0))
        throw std::invalid_argument("LanczosConfig: breakdown tolerance must lie in (0, 1)");
    for(const auto& r : stop_rules) {
        if(!(r.tolerance > 0.0)) throw std::invalid_argument("StopRule: tolerance must be > 0");
        if(r.kind == StopRule::Kind::relative_change && !r.estimate)
            throw std::invalid_argument("StopRule: relative-change rule needs an estimate");
    }
}

QuadratureRule make_quadrature(const TridiagonalProjection& p) {
    if(p.k() == 0) throw std::invalid_argument("make_quadrature: empty projection");
    auto eig = tensor::symtridiag_eig(p.alphas, p.betas);
    QuadratureRule q;
    q.nodes = std::move(eig.values);
    q.weights.resize(q.nodes.size());
    const double mass = p.beta1 * p.beta1;
    for(std::size_t j = 0; j < q.nodes.size(); ++j) {
        const double v = eig.vectors(0, static_cast<Eigen::Index>(j));
        double w = mass * v * v;
        if(w < 0.0) {
            if(w < -1e-12 * mass) throw NumericalError("negative quadrature weight");
            w = 0.0;
        }
        q.weights[j] = w;
    }
    return q;
}

LanczosRun run_lanczos(const Mpo& a, const StartingBlock& start, const LanczosConfig& cfg, std::string operator_label) {
    cfg.validate();
    if(a.length() != start.mpo.length()) throw ShapeError("run_lanczos: operator and starting block lengths differ");
    check_hermitian(a);

    LanczosRun run;
    run.sites = a.length();
    run.operator_label = std::move(operator_label);
    run.start_label = start.label;
    run.operator_fingerprint = mpo::fingerprint(a);
    auto& proj = run.projection;

    std::vector<RuleState> rule_states(cfg.stop_rules.size());
    std::vector<Mpo> basis;
    std::optional<Mpo> u_prev;
    Mpo v = start.mpo;
    const std::size_t d_max = cfg.d_max;

    for(std::size_t i = 1; i <= cfg.k_max; ++i) {
        const double beta = mpo::frobenius_norm(v);
        check_finite(beta, "beta", i);
        if(i == 1) {
            if(!(beta > 0.0)) throw std::invalid_argument("run_lanczos: zero starting block");
            proj.beta1 = beta;
        } else if(beta < cfg.breakdown_tolerance * proj.beta1) {
            proj.termination = Termination::breakdown;
            break;
        } else {
            proj.betas.push_back(beta);
        }

        Mpo u = mpo::scalar_multiply(1.0 / beta, v);
        IterationLog log{i, 0.0, 1};

        auto w = mpo::multiply(a, u, d_max);
        log.discarded_weight += w.report.total_discarded();
        if(u_prev) {
            w = mpo::sum(w.mpo, mpo::scalar_multiply(-beta, *u_prev), d_max);
            log.discarded_weight += w.report.total_discarded();
        }

        const cplx alpha_c = mpo::inner_product(u, w.mpo);
        check_finite(alpha_c.real(), "alpha", i);
        if(std::abs(alpha_c.imag()) > 1e-8 * std::abs(alpha_c.real()) + 1e-12) {
            std::ostringstream os;
            os << "alpha_" << i << " has imaginary part " << alpha_c.imag() << " (operator not Hermitian?)";
            throw NumericalError(os.str());
        }
        const double alpha = alpha_c.real();
        w = mpo::sum(w.mpo, mpo::scalar_multiply(-alpha, u), d_max);
        log.discarded_weight += w.report.total_discarded();

        if(cfg.reorthogonalization == Reorthogonalization::full || cfg.keep_basis) basis.push_back(u);
        if(cfg.reorthogonalization == Reorthogonalization::full) {
            for(const auto& uj : basis) {
                const cplx c = mpo::inner_product(uj, w.mpo);
                w = mpo::sum(w.mpo, mpo::scalar_multiply(-c, uj), d_max);
                log.discarded_weight += w.report.total_discarded();
            }
        }

        proj.alphas.push_back(alpha);
        log.max_bond_dimension = w.mpo.max_bond_dimension();
        run.compression_log.push_back(log);

        if(!cfg.stop_rules.empty()) {
            const auto q = make_quadrature(proj);
            bool stop = false;
            for(std::size_t r = 0; r < cfg.stop_rules.size(); ++r)
                stop = rule_fires(cfg.stop_rules[r], rule_states[r], q) || stop;
            if(stop) {
                proj.termination = Termination::stop_rule;
                break;
            }
        }

        u_prev = std::move(u);
        v = std::move(w.mpo);
    }

    run.quadrature = make_quadrature(proj);
    if(cfg.keep_basis) run.basis = std::move(basis);
    return run;
}

double evaluate(const QuadratureRule& rule, const std::function<double(double)>& f) {
    double s = 0.0;
    for(std::size_t j = 0; j < rule.size(); ++j) {
        const double y = f(rule.nodes[j]);
        if(!std::isfinite(y)) {
            std::ostringstream os;
            os.precision(17);
            os << "function is not finite at quadrature node " << rule.nodes[j];
            throw DomainError(os.str());
        }
        s += rule.weights[j] * y;
    }
    return s;
}

double evaluate(const LanczosRun& run, const std::function<double(double)>& f) { return evaluate(run.quadrature, f); }

std::vector<double> evaluate_many(const LanczosRun& run, std::span<const std::function<double(double)>> fs) {
    std::vector<double> out;
    out.reserve(fs.size());
    for(const auto& f : fs) out.push_back(evaluate(run.quadrature, f));
    return out;
}

} // namespace mpotrace::lanczos
