#include "polaron/grid.hpp"

#include "polaron/errors.hpp"
#include "polaron/fft.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace polaron {

Grid3::Grid3(int n_per_axis, double box_length) : n_(n_per_axis), length_(box_length) {
    if (n_per_axis < 4 || n_per_axis % 2 != 0) {
        throw InvalidArgument("Grid3: n_per_axis must be even and >= 4");
    }
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        throw InvalidArgument("Grid3: box_length must be positive");
    }
}

double Grid3::wavenumber_unit() const noexcept { return 2.0 * std::numbers::pi / length_; }

std::array<int, 3> Grid3::unflatten(Eigen::Index flat) const noexcept {
    const int iz = int(flat % n_);
    const int iy = int((flat / n_) % n_);
    const int ix = int(flat / (Eigen::Index(n_) * n_));
    return {ix, iy, iz};
}

Eigen::Index Grid3::flatten(int ix, int iy, int iz) const noexcept {
    return (Eigen::Index(ix) * n_ + iy) * n_ + iz;
}

Vec3 Grid3::position(Eigen::Index flat) const noexcept {
    const auto [ix, iy, iz] = unflatten(flat);
    return {coordinate(ix), coordinate(iy), coordinate(iz)};
}

Eigen::Index Grid3::mirror(Eigen::Index flat) const noexcept {
    // x_j = (j - n/2) dx, so -x_j = x_{n - j} (mod n).
    const auto [ix, iy, iz] = unflatten(flat);
    auto m = [this](int j) { return (n_ - j) % n_; };
    return flatten(m(ix), m(iy), m(iz));
}

bool Grid3::is_commensurate(const Vec3& k, double tol) const noexcept {
    const Vec3 m = k / wavenumber_unit();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(m[a] - std::round(m[a])) > tol) return false;
    }
    return true;
}

Field::Field(const Grid3& g, Eigen::VectorXcd v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) {
        throw InvalidArgument("Field: value count does not match grid");
    }
}

double Field::norm() const { return std::sqrt(values.squaredNorm() * grid.cell_volume()); }

void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (a.grid != b.grid) {
        throw InvalidArgument(std::string(where) + ": grid mismatch");
    }
}

cd inner(const Field& f, const Field& g) {
    require_same_grid(f, g, "inner");
    return f.values.dot(g.values) * f.grid.cell_volume();
}

Field apply_laplacian(const Field& f) {
    const int n = f.grid.n();
    Eigen::VectorXcd work = f.values;
    fft::forward(n, work);
    work.array() *= fft::k_squared(f.grid).array();
    fft::backward(n, work);
    work /= double(f.grid.size());
    return Field(f.grid, std::move(work));
}

Field apply_shifted_inverse_laplacian(const Field& f, double shift) {
    if (!(shift > 0.0)) throw InvalidArgument("apply_shifted_inverse_laplacian: shift must be positive");
    const int n = f.grid.n();
    Eigen::VectorXcd work = f.values;
    fft::forward(n, work);
    work.array() /= (fft::k_squared(f.grid).array() + shift);
    fft::backward(n, work);
    work /= double(f.grid.size());
    return Field(f.grid, std::move(work));
}

Field coulomb_convolve(const Field& rho, CoulombBoundary boundary) {
    const Grid3& g = rho.grid;
    Eigen::VectorXcd work = rho.values;
    if (rho.max_imag() > 1e-12) {
        std::cerr << "warning: coulomb_convolve received a complex density; using its real part\n";
    }
    work = work.real().cast<cd>();

    const int n = g.n();
    fft::forward(n, work);
    const Eigen::VectorXd& k2 = fft::k_squared(g);
    const double four_pi = 4.0 * std::numbers::pi;
    const double cutoff = 0.5 * g.box_length();
    for (Eigen::Index i = 0; i < work.size(); ++i) {
        double kernel = 0.0;
        if (boundary == CoulombBoundary::isolated) {
            if (k2[i] == 0.0) {
                kernel = 2.0 * std::numbers::pi * cutoff * cutoff;
            } else {
                kernel = four_pi * (1.0 - std::cos(std::sqrt(k2[i]) * cutoff)) / k2[i];
            }
        } else if (k2[i] != 0.0) {
            kernel = four_pi / k2[i];
        }
        work[i] *= kernel;
    }
    fft::backward(n, work);
    work /= double(g.size());
    return Field(g, work.real().cast<cd>());
}

Field plane_wave(const Grid3& g, const Vec3& k) {
    Field out(g);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        out.values[i] = std::polar(1.0, k.dot(g.position(i)));
    }
    return out;
}

Field gaussian(const Grid3& g, double sigma, const Vec3& centre) {
    Field out(g);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double r2 = (g.position(i) - centre).squaredNorm();
        out.values[i] = std::exp(-r2 / (2.0 * sigma * sigma));
    }
    out.values /= out.norm();
    return out;
}

Field translate(const Field& f, const Vec3& a) {
    const Grid3& g = f.grid;
    const int n = g.n();
    const double unit = g.wavenumber_unit();
    Eigen::VectorXcd work = f.values;
    fft::forward(n, work);
    for (Eigen::Index i = 0; i < work.size(); ++i) {
        const auto [ix, iy, iz] = g.unflatten(i);
        // The Nyquist plane has no well-defined sign under a fractional shift.
        if (ix == n / 2 || iy == n / 2 || iz == n / 2) {
            work[i] = 0.0;
            continue;
        }
        const Vec3 k(unit * g.frequency(ix), unit * g.frequency(iy), unit * g.frequency(iz));
        work[i] *= std::polar(1.0, -k.dot(a));
    }
    fft::backward(n, work);
    work /= double(g.size());
    return Field(g, std::move(work));
}

Vec3 centre_of_mass(const Field& f) {
    const Grid3& g = f.grid;
    const double unit = g.wavenumber_unit();
    Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double w = std::norm(f.values[i]);
        const Vec3 x = g.position(i);
        for (int a = 0; a < 3; ++a) acc[a] += w * std::polar(1.0, unit * x[a]);
    }
    Vec3 com;
    for (int a = 0; a < 3; ++a) com[a] = std::arg(acc[a]) / unit;
    return com;
}

double mass_outside(const Field& f, double radius) {
    const Grid3& g = f.grid;
    double mass = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (g.position(i).norm() > radius) mass += std::norm(f.values[i]);
    }
    return mass * g.cell_volume();
}

Field random_field(const Grid3& g, std::mt19937_64& rng, bool real_valued) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Field out(g);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double re = normal(rng);
        const double im = real_valued ? 0.0 : normal(rng);
        out.values[i] = cd(re, im);
    }
    out.values /= out.norm();
    return out;
}

Field density(const Field& f) {
    return Field(f.grid, f.values.cwiseAbs2().cast<cd>());
}

}  // namespace polaron
