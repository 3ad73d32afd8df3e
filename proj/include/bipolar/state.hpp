#pragma once

#include <cstddef>
#include <vector>

#include "bipolar/numerics.hpp"

namespace bipolar {

enum class Sign { plus, minus };

/// The (psi_+, psi_-) decomposition of one surface's wavefunction.
struct ComponentPair {
    ComplexField plus;
    ComplexField minus;

    const ComplexField& operator[](Sign s) const { return s == Sign::plus ? plus : minus; }
    ComplexField& operator[](Sign s) { return s == Sign::plus ? plus : minus; }

    ComplexField total() const { return plus + minus; }
};

/// Per-surface bipolar components plus time and mass. Every field shares
/// one Grid.
struct BipolarState {
    std::vector<ComponentPair> surfaces;
    double t = 0.0;
    double mass = 1.0;

    /// Single surface, psi_- = 0.
    static BipolarState incident(const ComplexField& psi0, double mass, double t = 0.0);

    std::size_t n_surfaces() const { return surfaces.size(); }
    const Grid& grid() const { return surfaces.front().plus.grid(); }

    /// Throws std::invalid_argument on an empty state or mixed grids.
    void check_consistent() const;
};

/// Time derivatives of every component, same shape as BipolarState::surfaces.
struct RhsFields {
    std::vector<ComponentPair> surfaces;
};

}  // namespace bipolar
