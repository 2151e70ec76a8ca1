// mode_set.hpp: finite phonon momentum quadrature {k_i, w_i}
//
// The coupling function is G_x(k) = e^{-ikx} / (2 pi |k|). Discrete ladder
// operators carry the quadrature weight, a_i ~ sqrt(w_i) a(k_i), so every
// Fock-space coefficient picks up sqrt(w_i) per mode index.

#pragma once

#include "polaron/grid.hpp"

#include <string>
#include <vector>

namespace polaron {

struct ModeSet {
    std::vector<Vec3> k;
    std::vector<double> w;
    std::vector<int> partner;  // k[partner[i]] == -k[i]

    int size() const noexcept { return int(k.size()); }
    // 1 / (2 pi |k_i|)
    double coupling_amplitude(int i) const;
};

// Validates nonzero momenta, positive weights and parity closure.
ModeSet make_mode_set(std::vector<Vec3> k, std::vector<double> w);

// Throws unless every k_i is a reciprocal lattice vector of g.
void require_commensurate(const ModeSet& modes, const Grid3& g);

// Binding presets: M = 2 (+-0.5 x), M = 4 (+-0.5 x, +-1.0 x), M = 6 (+-0.5 along each axis).
ModeSet mode_preset(int M, double weight);

// G_x(k_i) sampled on the grid.
Field coupling_field(const ModeSet& modes, int i, const Grid3& g);

// Axes along which some mode has a nonzero component.
std::vector<int> active_axes(const ModeSet& modes);

}  // namespace polaron
