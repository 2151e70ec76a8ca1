#include "polaron/errors.hpp"
#include "polaron/pfld.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace polaron;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "polaron-test-pfld";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("pfld round trip of complex and real fields") {
    const Grid3 g(8, 5.0);
    std::mt19937_64 rng(5);
    const Field f = random_field(g, rng, false);
    pfld::save_field(f, scratch("c.pfld"), "test");
    pfld::Header h;
    const Field back = pfld::load_field(scratch("c.pfld"), g, &h);
    CHECK(back.values == f.values);
    CHECK(h.dtype == "c128");
    CHECK(h.tag == "test");
    CHECK(h.grid_n == 8);
    CHECK(h.box_length == 5.0);

    const Field r = random_field(g, rng, true);
    pfld::save_field(r, scratch("r.pfld"), "real");
    CHECK(pfld::read_header(scratch("r.pfld")).dtype == "f64");
    CHECK(pfld::load_field(scratch("r.pfld")).values == r.values);
}

TEST_CASE("pfld matrices keep row-major layout") {
    Eigen::MatrixXcd m(2, 3);
    m << cd(1, 2), 3, 4, 5, cd(0, -6), 7;
    pfld::save_matrix(m, scratch("m.pfld"), "K");
    pfld::Header h;
    CHECK(pfld::load_matrix(scratch("m.pfld"), &h) == m);
    CHECK(h.shape == std::vector<long long>{2, 3});
    CHECK(h.grid_n == 0);
}

TEST_CASE("pfld errors") {
    const Grid3 g(8, 5.0);
    const Field f = gaussian(g, 1.0, Vec3::Zero());
    pfld::save_field(f, scratch("t.pfld"), "x");
    CHECK_THROWS_AS(pfld::load_field(scratch("t.pfld"), Grid3(8, 6.0)), IoError);
    CHECK_THROWS_AS(pfld::load_matrix(scratch("t.pfld")), IoError);

    fs::resize_file(scratch("t.pfld"), fs::file_size(scratch("t.pfld")) - 8);
    CHECK_THROWS_AS(pfld::load_field(scratch("t.pfld")), IoError);

    std::ofstream(scratch("bad.pfld")) << "not json\n";
    CHECK_THROWS_AS(pfld::load_field(scratch("bad.pfld")), IoError);
    CHECK_THROWS_AS(pfld::load_field(scratch("missing.pfld")), IoError);
}
