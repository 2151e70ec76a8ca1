#include "fixtures.hpp"

#include "polaron/errors.hpp"
#include "polaron/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace polaron;

namespace {

// Naive DFT sum of |k|^2 |f_hat(k)|^2 with the continuum normalization.
double fourier_kinetic(const Field& f) {
    const Grid3& g = f.grid;
    const int n = g.n();
    const double unit = g.wavenumber_unit();
    double total = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const Vec3 k(unit * g.frequency(a), unit * g.frequency(b), unit * g.frequency(c));
                cd fk = 0.0;
                for (Eigen::Index i = 0; i < g.size(); ++i) fk += std::polar(1.0, -k.dot(g.position(i))) * f.values[i];
                total += k.squaredNorm() * std::norm(fk);
            }
    // Parseval: sum_x |f|^2 dV = (dV / n^3) sum_k |f_k|^2
    return total * g.cell_volume() / double(g.size());
}

Field gaussian_density(const Grid3& g, double s, const Vec3& centre) {
    Field rho(g);
    const double norm = std::pow(2 * std::numbers::pi * s * s, -1.5);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        rho.values[i] = norm * std::exp(-(g.position(i) - centre).squaredNorm() / (2 * s * s));
    }
    return rho;
}

}  // namespace

TEST_CASE("grid geometry") {
    const Grid3 g(8, 4.0);
    CHECK(g.size() == 512);
    CHECK(g.dx() == doctest::Approx(0.5));
    CHECK(g.coordinate(4) == 0.0);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        CHECK(g.flatten(g.unflatten(i)[0], g.unflatten(i)[1], g.unflatten(i)[2]) == i);
        const Vec3 x = g.position(i);
        const Vec3 y = g.position(g.mirror(i));
        // the mirror of the most negative coordinate wraps to itself
        for (int a = 0; a < 3; ++a) {
            if (g.unflatten(i)[a] != 0) CHECK(y[a] == doctest::Approx(-x[a]));
        }
    }
    CHECK(g.is_commensurate(Vec3(2 * std::numbers::pi / 4.0, 0, 0)));
    CHECK_FALSE(g.is_commensurate(Vec3(1.0, 0, 0)));
    CHECK_THROWS_AS(Grid3(7, 1.0), InvalidArgument);
    CHECK_THROWS_AS(Grid3(8, -1.0), InvalidArgument);
}

TEST_CASE("laplacian on constants and plane waves") {
    const Grid3 g(8, 6.0);
    Field c(g);
    c.values.setConstant(2.5);
    CHECK(apply_laplacian(c).values.cwiseAbs().maxCoeff() < 1e-12);

    const Vec3 k = g.wavenumber_unit() * Vec3(1, -2, 3);
    const Field pw = plane_wave(g, k);
    const Field lp = apply_laplacian(pw);
    CHECK((lp.values - k.squaredNorm() * pw.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("kinetic energy matches the Fourier sum") {
    const Grid3 g(6, 5.0);
    std::mt19937_64 rng(11);
    const Field f = random_field(g, rng, false);
    const double direct = inner(f, apply_laplacian(f)).real();
    CHECK(direct >= 0.0);
    CHECK(direct == doctest::Approx(fourier_kinetic(f)).epsilon(1e-10));
}

TEST_CASE("inner product") {
    const Grid3 g(8, 3.0);
    std::mt19937_64 rng(3);
    const Field f = random_field(g, rng, false);
    const Field h = random_field(g, rng, false);
    CHECK(inner(f, f).real() == doctest::Approx(f.norm() * f.norm()));
    CHECK(std::abs(inner(f, h) - std::conj(inner(h, f))) < 1e-14);
    const Field pw = plane_wave(g, g.wavenumber_unit() * Vec3(1, 0, 2));
    CHECK(inner(pw, pw).real() == doctest::Approx(g.box_volume()));
    CHECK_THROWS_AS(inner(f, Field(Grid3(8, 4.0))), InvalidArgument);
}

TEST_CASE("coulomb potential of a Gaussian") {
    const Grid3 g(32, 32.0);
    CHECK(coulomb_convolve(Field(g)).values.cwiseAbs().maxCoeff() == 0.0);

    const double s = 2.0;
    const Field v = coulomb_convolve(gaussian_density(g, s, Vec3::Zero()));
    const double centre = v.values[g.flatten(16, 16, 16)].real();
    CHECK(centre == doctest::Approx(std::sqrt(2 / std::numbers::pi) / s).epsilon(0.01));
}

TEST_CASE("coulomb energy of separated charges approaches q q' / d") {
    const Grid3 g(32, 32.0);
    const double d = 8.0;
    const Field a = gaussian_density(g, 1.0, Vec3(-d / 2, 0, 0));
    const Field b = gaussian_density(g, 1.0, Vec3(d / 2, 0, 0));
    const double e = inner(b, coulomb_convolve(a)).real();
    CHECK(e == doctest::Approx(1.0 / d).epsilon(0.02));
}

TEST_CASE("translation and centre of mass") {
    const Grid3 g(16, 8.0);
    const Field f = gaussian(g, 1.0, Vec3(0.3, -0.2, 0.1));
    const Vec3 com = centre_of_mass(f);
    CHECK(com[0] == doctest::Approx(0.3).epsilon(1e-3));
    const Field t = translate(f, Vec3(-0.3, 0.2, -0.1));
    CHECK(centre_of_mass(t).norm() < 1e-4);
    CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-6));
}
