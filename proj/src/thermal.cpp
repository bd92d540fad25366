#include "mpotrace/thermal.hpp"

#include "mpotrace/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace mpotrace::thermal {

namespace {

// 0.1 + 2*0.1 is 0.30000000000000004, not the double nearest 0.3.
double snap(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", t);
    return std::stod(buf);
}

void check_beta(double beta) {
    if(!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("inverse temperature must be finite and >= 0");
}

double shifted_sum(const QuadratureRule& rule, double beta, double shift) {
    double s = 0.0;
    for(std::size_t j = 0; j < rule.size(); ++j) s += rule.weights[j] * std::exp(-beta * (rule.nodes[j] - shift));
    return s;
}

void require_identity_start(const LanczosRun& run, const char* what) {
    if(run.start_label != "identity")
        throw std::invalid_argument(std::string(what) + ": needs an identity-start run, got '" + run.start_label + "'");
}

} // namespace

TemperatureGrid TemperatureGrid::uniform(double tmin, double tmax, double step, std::optional<double> delta_t) {
    if(!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("temperature step must be > 0");
    if(!(tmin > 0.0) || !std::isfinite(tmin) || !std::isfinite(tmax))
        throw std::invalid_argument("temperatures must be finite and > 0");
    if(tmax < tmin) throw std::invalid_argument("temperature max is below min");
    const auto n = static_cast<std::size_t>(std::floor((tmax - tmin) / step + 1e-9));
    TemperatureGrid g;
    g.temperatures.reserve(n + 1);
    for(std::size_t k = 0; k <= n; ++k) g.temperatures.push_back(snap(tmin + static_cast<double>(k) * step));
    g.delta_t = delta_t.value_or(step);
    g.validate();
    return g;
}

std::vector<double> TemperatureGrid::betas() const {
    std::vector<double> b;
    b.reserve(temperatures.size());
    for(double t : temperatures) b.push_back(1.0 / t);
    return b;
}

void TemperatureGrid::validate() const {
    if(temperatures.empty()) throw std::invalid_argument("temperature grid is empty");
    for(std::size_t k = 0; k < temperatures.size(); ++k) {
        if(!(temperatures[k] > 0.0) || !std::isfinite(temperatures[k]))
            throw std::invalid_argument("temperatures must be finite and > 0");
        if(k > 0 && !(temperatures[k] > temperatures[k - 1]))
            throw std::invalid_argument("temperature grid must be strictly increasing");
    }
    if(!(delta_t > 0.0) || !std::isfinite(delta_t)) throw std::invalid_argument("temperature offset dT must be > 0");
}

PartitionPoint partition_point(const QuadratureRule& rule, double beta) {
    check_beta(beta);
    if(rule.size() == 0) throw std::invalid_argument("empty quadrature rule");
    const double shift = rule.min_node();
    double s = 0.0, m1 = 0.0, m2 = 0.0, excess = 0.0;
    for(std::size_t j = 0; j < rule.size(); ++j) {
        const double x = rule.nodes[j];
        const double e = rule.weights[j] * std::exp(-beta * (x - shift));
        s += e;
        m1 += e * x;
        m2 += e * x * x;
        excess += e * (x - shift);
    }
    if(!(s > 0.0) || !std::isfinite(s)) throw NumericalError("partition sum is not positive and finite");
    PartitionPoint p;
    p.beta = beta;
    p.log_z = -beta * shift + std::log(s);
    p.mean_energy = m1 / s;
    p.second_moment = m2 / s;
    double var = 0.0;
    for(std::size_t j = 0; j < rule.size(); ++j) {
        const double d = rule.nodes[j] - p.mean_energy;
        var += rule.weights[j] * std::exp(-beta * (rule.nodes[j] - shift)) * d * d;
    }
    p.variance = var / s;
    p.entropy = std::max(0.0, beta * excess / s + std::log(s)); // >= 0 up to rounding
    return p;
}

double log_partition(const QuadratureRule& rule, double beta) {
    check_beta(beta);
    const double shift = rule.min_node();
    const double s = shifted_sum(rule, beta, shift);
    if(!(s > 0.0) || !std::isfinite(s)) throw NumericalError("partition sum is not positive and finite");
    return -beta * shift + std::log(s);
}

std::vector<PartitionPoint> partition_traces(const LanczosRun& run, std::span<const double> betas) {
    require_identity_start(run, "partition_traces");
    std::vector<PartitionPoint> out;
    out.reserve(betas.size());
    for(double b : betas) {
        auto p = partition_point(run.quadrature, b);
        if(b == 0.0) p.log_z = static_cast<double>(run.sites) * std::log(2.0);
        out.push_back(p);
    }
    return out;
}

double entropy_density(double log_z, double mean_energy, double beta, std::size_t length) {
    return (beta * mean_energy + log_z) / static_cast<double>(length);
}

double entropy_density(const PartitionPoint& p, std::size_t length) { return p.entropy / static_cast<double>(length); }

double specific_heat(const PartitionPoint& p, std::size_t length) {
    return p.beta * p.beta / static_cast<double>(length) * p.variance;
}

double specific_heat(double mean_energy, double second_moment, double beta, std::size_t length) {
    return beta * beta / static_cast<double>(length) * (second_moment - mean_energy * mean_energy);
}

double thermal_fidelity(const QuadratureRule& rule, double beta0, double beta1) {
    if(!(beta0 > 0.0) || !(beta1 > 0.0)) throw std::invalid_argument("thermal_fidelity: betas must be > 0");
    if(beta0 == beta1) return 1.0;
    const double mid = log_partition(rule, 0.5 * (beta0 + beta1));
    return std::exp(mid - 0.5 * (log_partition(rule, beta0) + log_partition(rule, beta1)));
}

double trace_distance_thermal(const QuadratureRule& rule, double beta0, double beta1) {
    if(!(beta0 > 0.0) || !(beta1 > 0.0)) throw std::invalid_argument("trace_distance_thermal: betas must be > 0");
    if(beta0 == beta1) return 0.0;
    const double lz0 = log_partition(rule, beta0);
    const double lz1 = log_partition(rule, beta1);
    double d = 0.0;
    for(std::size_t j = 0; j < rule.size(); ++j) {
        if(rule.weights[j] == 0.0) continue;
        const double lw = std::log(rule.weights[j]);
        const double a = lw - beta0 * rule.nodes[j] - lz0;
        const double b = lw - beta1 * rule.nodes[j] - lz1;
        const double hi = std::max(a, b), lo = std::min(a, b);
        d += -std::exp(hi) * std::expm1(lo - hi);
    }
    return d;
}

double trace_norm(const QuadratureRule& rule) {
    const double top = std::max(std::abs(rule.max_node()), std::abs(rule.min_node()));
    double s = 0.0;
    for(std::size_t j = 0; j < rule.size(); ++j) {
        double x = rule.nodes[j];
        if(x < 0.0) {
            if(x < -1e-6 * top) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "trace_norm: node %.6g is negative beyond tolerance", x);
                throw DomainError(buf);
            }
            x = 0.0;
        }
        s += rule.weights[j] * std::sqrt(x);
    }
    return s;
}

double trace_norm(const mpo::Mpo& a, const lanczos::LanczosConfig& cfg) {
    const auto gram = mpo::multiply(mpo::adjoint(a), a, cfg.d_max);
    const auto run = lanczos::run_lanczos(gram.mpo, models::identity_block(a.length()), cfg, "gram");
    return trace_norm(run.quadrature);
}

std::vector<double> expectation(const LanczosRun& z_run, std::span<const SignedRun> parts, std::span<const double> betas) {
    require_identity_start(z_run, "expectation");
    double shift = z_run.quadrature.min_node();
    for(const auto& p : parts) {
        if(p.run == nullptr) throw std::invalid_argument("expectation: null run");
        if(p.run->operator_fingerprint != z_run.operator_fingerprint || p.run->sites != z_run.sites)
            throw std::invalid_argument("expectation: runs belong to different Hamiltonians");
        shift = std::min(shift, p.run->quadrature.min_node());
    }
    std::vector<double> out;
    out.reserve(betas.size());
    for(double b : betas) {
        check_beta(b);
        const double z = shifted_sum(z_run.quadrature, b, shift);
        if(!(z > 0.0) || !std::isfinite(z)) throw NumericalError("expectation: partition sum underflow");
        double num = 0.0;
        for(const auto& p : parts) num += p.sign * shifted_sum(p.run->quadrature, b, shift);
        out.push_back(num / z);
    }
    return out;
}

RunPool::RunPool(mpo::Mpo hamiltonian, lanczos::LanczosConfig cfg, std::string operator_label)
    : hamiltonian_(std::move(hamiltonian)), cfg_(std::move(cfg)), label_(std::move(operator_label)) {
    cfg_.validate();
}

const LanczosRun& RunPool::get(const models::StartingBlock& start) {
    if(auto it = runs_.find(start.label); it != runs_.end()) return it->second;
    if(loader_) {
        if(auto cached = loader_(start.label)) {
            if(cached->operator_fingerprint != mpo::fingerprint(hamiltonian_) || cached->start_label != start.label ||
               cached->sites != hamiltonian_.length())
                throw CacheMismatch("cached run '" + start.label + "' does not match the Hamiltonian");
            ++cache_hits_;
            return runs_.emplace(start.label, std::move(*cached)).first->second;
        }
    }
    auto run = lanczos::run_lanczos(hamiltonian_, start, cfg_, label_);
    if(start.label == "identity")
        ++identity_runs_;
    else
        ++projector_runs_;
    if(saver_) saver_(run);
    return runs_.emplace(start.label, std::move(run)).first->second;
}

const LanczosRun& RunPool::identity() { return get(models::identity_block(hamiltonian_.length())); }

bool commutes_with_spin_flip(const mpo::Mpo& h) {
    const std::vector<Eigen::MatrixXcd> flips(h.length(), models::pauli_x());
    const auto x = mpo::product_mpo(flips);
    const auto xhx = mpo::operator_product(x, mpo::operator_product(h, x));
    const auto diff = mpo::sum(xhx, mpo::scalar_multiply(-1.0, h), mpo::kUnbounded);
    return mpo::frobenius_norm(diff.mpo) <= 1e-10 * std::max(mpo::frobenius_norm(h), 1.0);
}

std::vector<double> correlation_zz(RunPool& pool, SitePair sites, std::span<const double> betas, Symmetry symmetry) {
    const std::size_t length = pool.length();
    const auto& z = pool.identity();
    if(symmetry == Symmetry::spin_flip) {
        if(!commutes_with_spin_flip(pool.hamiltonian()))
            throw std::invalid_argument("correlation_zz: Hamiltonian does not commute with the global spin flip");
        const auto& same = pool.get(models::projector_block(length, {{sites.i, 0}, {sites.j, 0}}));
        const auto& diff = pool.get(models::projector_block(length, {{sites.i, 1}, {sites.j, 0}}));
        const SignedRun parts[] = {{&same, 1.0}, {&diff, -1.0}};
        auto zz = expectation(z, parts, betas);
        for(auto& v : zz) v *= 2.0;
        return zz;
    }

    const auto [pos, neg] = models::zz_decomposition(length, sites.i, sites.j);
    const SignedRun zz_parts[] = {{&pool.get(pos), 1.0}, {&pool.get(neg), -1.0}};
    const auto zz = expectation(z, zz_parts, betas);

    // <sz> = 2<P0> - 1, so the P1 half of the decomposition is never run
    auto single = [&](std::size_t site) {
        const auto p0 = models::z_decomposition(length, site).first;
        const SignedRun parts[] = {{&pool.get(p0), 1.0}};
        auto v = expectation(z, parts, betas);
        for(auto& x : v) x = 2.0 * x - 1.0;
        return v;
    };
    const auto zi = single(sites.i);
    const auto zj = single(sites.j);

    std::vector<double> c(betas.size());
    for(std::size_t k = 0; k < c.size(); ++k) c[k] = zz[k] - zi[k] * zj[k];
    return c;
}

ThermalSweepResult thermal_sweep(const LanczosRun& run, const TemperatureGrid& grid) {
    grid.validate();
    require_identity_start(run, "thermal_sweep");
    ThermalSweepResult result;
    result.length = run.sites;
    const auto& q = run.quadrature;
    for(double t : grid.temperatures) {
        ThermalRecord r;
        r.temperature = t;
        r.beta = 1.0 / t;
        const auto p = partition_point(q, r.beta);
        r.log_z = p.log_z;
        r.energy_density = p.mean_energy / static_cast<double>(run.sites);
        r.entropy = entropy_density(p, run.sites);
        r.specific_heat = specific_heat(p, run.sites);
        const double beta1 = 1.0 / (t + grid.delta_t);
        r.fidelity = thermal_fidelity(q, r.beta, beta1);
        r.trace_distance = trace_distance_thermal(q, r.beta, beta1);
        result.records.push_back(std::move(r));
    }
    return result;
}

} // namespace mpotrace::thermal
