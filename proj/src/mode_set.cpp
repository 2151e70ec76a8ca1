#include "polaron/mode_set.hpp"

#include "polaron/errors.hpp"

#include <numbers>

namespace polaron {

double ModeSet::coupling_amplitude(int i) const { return 1.0 / (2.0 * std::numbers::pi * k.at(std::size_t(i)).norm()); }

ModeSet make_mode_set(std::vector<Vec3> k, std::vector<double> w) {
    if (k.empty()) throw InvalidArgument("ModeSet: no modes");
    if (k.size() != w.size()) throw InvalidArgument("ModeSet: k and w differ in length");
    ModeSet m{std::move(k), std::move(w), {}};
    const int M = m.size();
    m.partner.assign(std::size_t(M), -1);
    for (int i = 0; i < M; ++i) {
        if (m.k[std::size_t(i)].norm() == 0.0) throw InvalidArgument("ModeSet: k = 0 is not allowed");
        if (!(m.w[std::size_t(i)] > 0.0)) throw InvalidArgument("ModeSet: weights must be positive");
        for (int j = 0; j < M; ++j) {
            if ((m.k[std::size_t(i)] + m.k[std::size_t(j)]).norm() <= 1e-12 * m.k[std::size_t(i)].norm()) {
                if (m.partner[std::size_t(i)] != -1) throw InvalidArgument("ModeSet: duplicate momenta");
                m.partner[std::size_t(i)] = j;
            }
        }
        if (m.partner[std::size_t(i)] == -1) throw InvalidArgument("ModeSet: not closed under k -> -k");
    }
    for (int i = 0; i < M; ++i) {
        if (m.w[std::size_t(m.partner[std::size_t(i)])] != m.w[std::size_t(i)]) {
            throw InvalidArgument("ModeSet: parity partners must share a weight");
        }
    }
    return m;
}

void require_commensurate(const ModeSet& modes, const Grid3& g) {
    for (const Vec3& k : modes.k) {
        if (!g.is_commensurate(k)) throw InvalidArgument("ModeSet: momentum not commensurate with the grid");
        const Vec3 m = k / g.wavenumber_unit();
        if (m.cwiseAbs().maxCoeff() >= g.n() / 2 - 0.5) {
            throw InvalidArgument("ModeSet: momentum at or beyond the grid Nyquist frequency");
        }
    }
}

ModeSet mode_preset(int M, double weight) {
    const Vec3 x = Vec3::UnitX(), y = Vec3::UnitY(), z = Vec3::UnitZ();
    switch (M) {
        case 2:
            return make_mode_set({0.5 * x, -0.5 * x}, std::vector<double>(2, weight));
        case 4:
            return make_mode_set({0.5 * x, -0.5 * x, 1.0 * x, -1.0 * x}, std::vector<double>(4, weight));
        case 6:
            return make_mode_set({0.5 * x, -0.5 * x, 0.5 * y, -0.5 * y, 0.5 * z, -0.5 * z},
                                 std::vector<double>(6, weight));
        default:
            throw InvalidArgument("mode_preset: M must be 2, 4 or 6");
    }
}

Field coupling_field(const ModeSet& modes, int i, const Grid3& g) {
    Field out = plane_wave(g, -modes.k.at(std::size_t(i)));
    out.values *= modes.coupling_amplitude(i);
    return out;
}

std::vector<int> active_axes(const ModeSet& modes) {
    std::vector<int> axes;
    for (int a = 0; a < 3; ++a) {
        for (const Vec3& k : modes.k) {
            if (k[a] != 0.0) {
                axes.push_back(a);
                break;
            }
        }
    }
    return axes;
}

}  // namespace polaron
