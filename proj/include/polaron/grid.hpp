// grid.hpp: periodic 3D grid, complex fields and spectral operators
//
// Points sit at x_j = (j - n/2) * dx for j = 0..n-1 along each axis, so the
// origin is a grid point and x -> -x maps the grid onto itself. Flat index is
// (ix * n + iy) * n + iz.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <random>

namespace polaron {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;

class Grid3 {
public:
    Grid3(int n_per_axis, double box_length);

    int n() const noexcept { return n_; }
    double box_length() const noexcept { return length_; }
    double dx() const noexcept { return length_ / n_; }
    double cell_volume() const noexcept { return dx() * dx() * dx(); }
    double box_volume() const noexcept { return length_ * length_ * length_; }
    Eigen::Index size() const noexcept { return Eigen::Index(n_) * n_ * n_; }

    // Coordinate of grid index j along one axis.
    double coordinate(int j) const noexcept { return (j - n_ / 2) * dx(); }
    Vec3 position(Eigen::Index flat) const noexcept;
    std::array<int, 3> unflatten(Eigen::Index flat) const noexcept;
    Eigen::Index flatten(int ix, int iy, int iz) const noexcept;

    // Signed FFT frequency index m for FFT slot j (Nyquist maps to -n/2).
    int frequency(int j) const noexcept { return j < n_ / 2 ? j : j - n_; }
    double wavenumber_unit() const noexcept;  // 2 pi / L

    // Flat index of the mirror point -x.
    Eigen::Index mirror(Eigen::Index flat) const noexcept;

    // True when k = 2 pi m / L for an integer 3-vector m.
    bool is_commensurate(const Vec3& k, double tol = 1e-9) const noexcept;

    bool operator==(const Grid3& other) const noexcept {
        return n_ == other.n_ && length_ == other.length_;
    }
    bool operator!=(const Grid3& other) const noexcept { return !(*this == other); }

private:
    int n_;
    double length_;
};

struct Field {
    Grid3 grid;
    Eigen::VectorXcd values;

    explicit Field(const Grid3& g) : grid(g), values(Eigen::VectorXcd::Zero(g.size())) {}
    Field(const Grid3& g, Eigen::VectorXcd v);

    double norm() const;
    double max_imag() const { return values.imag().cwiseAbs().maxCoeff(); }
};

void require_same_grid(const Field& a, const Field& b, const char* where);

// <f, g> = sum conj(f) g dV, conjugate-linear in f.
cd inner(const Field& f, const Field& g);

// p^2 f = -Laplacian f, evaluated spectrally.
Field apply_laplacian(const Field& f);

// (p^2 + shift)^{-1} f; shift must be positive.
Field apply_shifted_inverse_laplacian(const Field& f, double shift);

enum class CoulombBoundary {
    // Spherically truncated kernel with radius L/2: exact free-space
    // convolution for densities supported within radius L/4 of the centre.
    isolated,
    // Plain periodic kernel 4 pi / k^2 with the k = 0 mode removed.
    jellium,
};

// (rho * 1/|x|)(x). Imaginary part of rho is dropped with a warning.
Field coulomb_convolve(const Field& rho, CoulombBoundary boundary = CoulombBoundary::isolated);

// e^{i k.x} sampled on the grid.
Field plane_wave(const Grid3& g, const Vec3& k);

// Normalized (in L^2) Gaussian exp(-|x - centre|^2 / (2 sigma^2)).
Field gaussian(const Grid3& g, double sigma, const Vec3& centre = Vec3::Zero());

// Fourier interpolation shift: returns f(x - a).
Field translate(const Field& f, const Vec3& a);

// Periodic centre of mass of |f|^2 (circular mean per axis).
Vec3 centre_of_mass(const Field& f);

// Integral of |f|^2 outside radius r about the origin.
double mass_outside(const Field& f, double radius);

// Complex Gaussian random field with unit L^2 norm.
Field random_field(const Grid3& g, std::mt19937_64& rng, bool real_valued = false);

// Pointwise |f|^2 as a real field.
Field density(const Field& f);

}  // namespace polaron
