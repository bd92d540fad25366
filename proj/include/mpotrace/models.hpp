#pragma once

#include "mpotrace/mpo.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

// Site labels in this header are 1-based (site 1 is the leftmost spin),
// matching the usual physics notation. Internally MPO sites are 0-based.

namespace mpotrace::models {

using mpo::Mpo;

struct IsingCouplings {
    double j = 1.0;
    double g = 1.0;
};

struct LmgCouplings {
    double h = 0.0;
};

enum class Family { ising, lmg };

struct ModelSpec {
    std::size_t length = 2;
    std::variant<IsingCouplings, LmgCouplings> couplings;

    [[nodiscard]] Family family() const noexcept {
        return std::holds_alternative<IsingCouplings>(couplings) ? Family::ising : Family::lmg;
    }
    /// The swept parameter: g for Ising, h for LMG.
    [[nodiscard]] double parameter() const noexcept;
    [[nodiscard]] std::string name() const;  // "ising" | "lmg"
    [[nodiscard]] std::string label() const; // e.g. "lmg(L=12,h=0.2)"
    void validate() const;
};

/// H = J sum_i sx_i sx_{i+1} + g sum_i sz_i on an open chain. Bond dimension 3.
Mpo ising_mpo(std::size_t length, double j, double g);

/// H = -Sx^2/L - 2 h Sz with S_a = sum_i s^a_i / 2. Bond dimension 3.
Mpo lmg_mpo(std::size_t length, double h);

Mpo build_hamiltonian(const ModelSpec& spec);

/*! Lanczos starting block B for trace(B^dagger f(A) B).
 *
 * For an observable O >= 0 the block is sqrt(O); projectors are their own
 * square roots, so all blocks built here are projectors.
 */
struct StartingBlock {
    Mpo mpo;
    std::string label;
    double squared_norm = 0.0; // trace(B^dagger B)
};

StartingBlock identity_block(std::size_t length);

/// Wraps an arbitrary non-zero operator; squared_norm is computed.
StartingBlock make_block(Mpo mpo, std::string label);

struct SiteState {
    std::size_t site; // 1-based
    int state;        // 0 or 1; |0> has sz = +1
};

/// Product of single-site projectors |s><s| on the listed sites, identity elsewhere.
StartingBlock projector_block(std::size_t length, std::span<const SiteState> sites);

inline StartingBlock projector_block(std::size_t length, std::initializer_list<SiteState> sites) {
    return projector_block(length, std::span<const SiteState>(sites.begin(), sites.end()));
}

/// sz_i sz_j = (P0 P0 + P1 P1) - (P1 P0 + P0 P1); each part is a bond-2 projector.
std::pair<StartingBlock, StartingBlock> zz_decomposition(std::size_t length, std::size_t i, std::size_t j);

/// sz_i = P0_i - P1_i.
std::pair<StartingBlock, StartingBlock> z_decomposition(std::size_t length, std::size_t i);

Eigen::MatrixXcd pauli_x();
Eigen::MatrixXcd pauli_y();
Eigen::MatrixXcd pauli_z();

} // namespace mpotrace::models
