#include "mpotrace/models.hpp"

#include "mpotrace/errors.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace mpotrace::models {

using mpo::DenseTensor;

namespace {

// Finite-state-machine MPO with three channels: 2 = nothing placed yet,
// 1 = one operator of a two-body term placed, 0 = all terms complete.
// `open`, `hold` and `close` build the two-body part, `onsite` the one-body
// part. Left boundary selects channel 2, right boundary channel 0.
Mpo three_channel_mpo(std::size_t length, const Eigen::MatrixXcd& open, const Eigen::MatrixXcd& hold,
                      const Eigen::MatrixXcd& close, const Eigen::MatrixXcd& onsite) {
    const std::size_t d = static_cast<std::size_t>(onsite.rows());
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(onsite.rows(), onsite.cols());

    DenseTensor bulk({3, d, d, 3});
    auto put = [&](std::size_t l, std::size_t r, const Eigen::MatrixXcd& op) {
        for(std::size_t s = 0; s < d; ++s)
            for(std::size_t t = 0; t < d; ++t) bulk(l, s, t, r) = op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
    };
    put(2, 2, id);
    put(2, 1, open);
    put(1, 1, hold);
    put(1, 0, close);
    put(2, 0, onsite);
    put(0, 0, id);

    std::vector<DenseTensor> sites;
    sites.reserve(length);
    for(std::size_t i = 0; i < length; ++i) {
        const bool first = i == 0, last = i + 1 == length;
        DenseTensor w({first ? 1u : 3u, d, d, last ? 1u : 3u});
        for(std::size_t l = 0; l < w.extent(0); ++l)
            for(std::size_t r = 0; r < w.extent(3); ++r)
                for(std::size_t s = 0; s < d; ++s)
                    for(std::size_t t = 0; t < d; ++t) w(l, s, t, r) = bulk(first ? 2 : l, s, t, last ? 0 : r);
        sites.push_back(std::move(w));
    }
    return Mpo(std::move(sites));
}

Eigen::MatrixXcd projector(int state) {
    if(state != 0 && state != 1) throw std::invalid_argument("projector state must be 0 or 1");
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
    p(state, state) = 1.0;
    return p;
}

void check_site(std::size_t length, std::size_t site) {
    if(site < 1 || site > length)
        throw std::out_of_range("site " + std::to_string(site) + " outside 1.." + std::to_string(length));
}

// Bond-2 block sum_{a} P(first[a])_i P(second[a])_j.
StartingBlock two_site_projector(std::size_t length, std::size_t i, std::size_t j, const int (&first)[2],
                                 const int (&second)[2], std::string label) {
    if(i == j) throw std::invalid_argument("two-site projector needs distinct sites");
    check_site(length, i);
    check_site(length, j);
    if(i > j) throw std::invalid_argument("two-site projector expects i < j");
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);

    std::vector<DenseTensor> sites;
    for(std::size_t k = 1; k <= length; ++k) {
        if(k < i || k > j) {
            sites.push_back(DenseTensor::from_matrix(id).reshaped({1, 2, 2, 1}));
            continue;
        }
        const std::size_t left = k == i ? 1 : 2;
        const std::size_t right = k == j ? 1 : 2;
        DenseTensor w({left, 2, 2, right});
        for(std::size_t a = 0; a < 2; ++a) {
            const Eigen::MatrixXcd op = k == i ? projector(first[a]) : k == j ? projector(second[a]) : id;
            const std::size_t l = left == 1 ? 0 : a;
            const std::size_t r = right == 1 ? 0 : a;
            for(std::size_t s = 0; s < 2; ++s)
                for(std::size_t t = 0; t < 2; ++t) w(l, s, t, r) = op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
        }
        sites.push_back(std::move(w));
    }
    return make_block(Mpo(std::move(sites)), std::move(label));
}

} // namespace

Eigen::MatrixXcd pauli_x() {
    Eigen::MatrixXcd m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Eigen::MatrixXcd pauli_y() {
    Eigen::MatrixXcd m(2, 2);
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}

Eigen::MatrixXcd pauli_z() {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

double ModelSpec::parameter() const noexcept {
    if(const auto* c = std::get_if<IsingCouplings>(&couplings)) return c->g;
    return std::get<LmgCouplings>(couplings).h;
}

std::string ModelSpec::name() const { return family() == Family::ising ? "ising" : "lmg"; }

std::string ModelSpec::label() const {
    // shortest round-trip form: exact, and part of the cache key
    const auto num = [](double x) {
        char buf[32];
        return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
    };
    std::string s = name() + "(L=" + std::to_string(length);
    if(const auto* c = std::get_if<IsingCouplings>(&couplings))
        s += ",J=" + num(c->j) + ",g=" + num(c->g) + ")";
    else
        s += ",h=" + num(std::get<LmgCouplings>(couplings).h) + ")";
    return s;
}

void ModelSpec::validate() const {
    if(length < 2) throw std::invalid_argument("model length must be >= 2");
    if(const auto* c = std::get_if<IsingCouplings>(&couplings)) {
        if(!std::isfinite(c->j) || !std::isfinite(c->g)) throw std::invalid_argument("Ising couplings must be finite");
    } else if(!std::isfinite(std::get<LmgCouplings>(couplings).h)) {
        throw std::invalid_argument("LMG field must be finite");
    }
}

Mpo ising_mpo(std::size_t length, double j, double g) {
    if(length < 2) throw std::invalid_argument("ising_mpo: length must be >= 2");
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(2, 2);
    return three_channel_mpo(length, j * pauli_x(), zero, pauli_x(), g * pauli_z());
}

Mpo lmg_mpo(std::size_t length, double h) {
    if(length < 2) throw std::invalid_argument("lmg_mpo: length must be >= 2");
    // -Sx^2/L = -1/4 I - (1/2L) sum_{i<j} sx_i sx_j ; -2h Sz = -h sum_i sz_i
    const auto n = static_cast<double>(length);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
    const Eigen::MatrixXcd onsite = -h * pauli_z() - (0.25 / n) * id;
    return three_channel_mpo(length, (-0.5 / n) * pauli_x(), id, pauli_x(), onsite);
}

Mpo build_hamiltonian(const ModelSpec& spec) {
    spec.validate();
    if(const auto* c = std::get_if<IsingCouplings>(&spec.couplings)) return ising_mpo(spec.length, c->j, c->g);
    return lmg_mpo(spec.length, std::get<LmgCouplings>(spec.couplings).h);
}

StartingBlock make_block(Mpo mpo, std::string label) {
    const double n = mpo::frobenius_norm(mpo);
    if(!(n > 0.0)) throw std::invalid_argument("starting block '" + label + "' is the zero operator");
    return {std::move(mpo), std::move(label), n * n};
}

StartingBlock identity_block(std::size_t length) {
    StartingBlock b{mpo::identity_mpo(length), "identity", 0.0};
    b.squared_norm = std::ldexp(1.0, static_cast<int>(length));
    return b;
}

StartingBlock projector_block(std::size_t length, std::span<const SiteState> sites) {
    if(length == 0) throw std::invalid_argument("projector_block: length must be >= 1");
    std::vector<Eigen::MatrixXcd> ops(length, Eigen::MatrixXcd::Identity(2, 2));
    std::vector<bool> used(length, false);
    std::string label;
    for(const auto& [site, state] : sites) {
        check_site(length, site);
        if(used[site - 1]) throw std::invalid_argument("projector_block: duplicate site " + std::to_string(site));
        used[site - 1] = true;
        ops[site - 1] = projector(state);
        label += "P" + std::to_string(state) + "_" + std::to_string(site);
    }
    if(label.empty()) label = "identity";
    StartingBlock b{mpo::product_mpo(ops), std::move(label), 0.0};
    b.squared_norm = std::ldexp(1.0, static_cast<int>(length - sites.size()));
    return b;
}

std::pair<StartingBlock, StartingBlock> zz_decomposition(std::size_t length, std::size_t i, std::size_t j) {
    const std::string ij = std::to_string(i) + "_" + std::to_string(j);
    return {two_site_projector(length, i, j, {0, 1}, {0, 1}, "P00+P11_" + ij),
            two_site_projector(length, i, j, {1, 0}, {0, 1}, "P10+P01_" + ij)};
}

std::pair<StartingBlock, StartingBlock> z_decomposition(std::size_t length, std::size_t i) {
    return {projector_block(length, {{i, 0}}), projector_block(length, {{i, 1}})};
}

} // namespace mpotrace::models
