#include "polaron/config.hpp"
#include "polaron/errors.hpp"
#include "polaron/manifest.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace polaron;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path dir = fs::temp_directory_path() / "polaron-test-config";
    fs::create_directories(dir);
    std::ofstream(dir / name) << text;
    return dir / name;
}

}  // namespace

TEST_CASE("presets") {
    const RunConfig small = preset_config("desk-small");
    CHECK(small.grid_n == 8);
    CHECK(small.modes == 2);
    const RunConfig standard = preset_config("desk-standard");
    CHECK(standard.grid_n == 16);
    CHECK(standard.modes == 4);
    CHECK(standard.n_max == 6);
    CHECK(preset_config("pekar-hi").grid_n == 48);
    CHECK_THROWS_AS(preset_config("huge"), InvalidArgument);
}

TEST_CASE("config files: comments, lists, later values win") {
    const auto p = write_file("a.cfg",
                              "# comment\n"
                              "preset = desk-standard\n"
                              "alphas = 1.5, 3\n"
                              "n_max = 3   # trailing comment\n"
                              "\n"
                              "n_max = 5\n"
                              "out_dir = somewhere\n");
    const RunConfig c = load_config(p, preset_config("desk-small"));
    CHECK(c.preset == "desk-standard");
    CHECK(c.grid_n == 16);
    CHECK(c.alphas == std::vector<double>{1.5, 3.0});
    CHECK(c.n_max == 5);
    CHECK(c.out_dir == "somewhere");
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(load_config(write_file("b.cfg", "grid = 8\n"), RunConfig{}), InvalidArgument);
    CHECK_THROWS_AS(load_config(write_file("c.cfg", "n_max = four\n"), RunConfig{}), InvalidArgument);
    CHECK_THROWS_AS(load_config(write_file("d.cfg", "n_max 4\n"), RunConfig{}), InvalidArgument);
    CHECK_THROWS_AS(load_config(write_file("e.cfg", "n_max = 4\npreset = desk-small\n"), RunConfig{}),
                    InvalidArgument);
    CHECK_THROWS_AS(load_config("/nonexistent/x.cfg", RunConfig{}), IoError);

    RunConfig c;
    CHECK_THROWS_AS(apply_setting(c, "weight", "1e400"), InvalidArgument);
    apply_setting(c, "alphas", "2, -1");
    CHECK_THROWS_AS(validate(c), InvalidArgument);
    c = RunConfig{};
    c.initial_state = "thermal";
    CHECK_THROWS_AS(validate(c), InvalidArgument);
}

TEST_CASE("every field is echoed and can be set back") {
    RunConfig c = preset_config("desk-standard");
    c.alphas = {2.5, 7};
    c.seed = 42;
    RunConfig d;
    for (const auto& [k, v] : config_entries(c)) apply_setting(d, k, v);
    CHECK(config_entries(d) == config_entries(c));
    CHECK(config_hash(d) == config_hash(c));
    d.out_dir = "elsewhere";
    CHECK(config_hash(d) == config_hash(c));
    d.weight += 1;
    CHECK(config_hash(d) != config_hash(c));
}

TEST_CASE("tau schedule") {
    const auto t = tau_schedule(2.0, 4);
    CHECK(t == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
}

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("manifest is written atomically with checks") {
    Manifest m("selftest", preset_config("desk-small"));
    m.check("ok", true, 0.0, 1.0);
    CHECK(m.all_checks_passed());
    m.check("bad", false, 2.0, 1.0);
    CHECK_FALSE(m.all_checks_passed());
    const fs::path dir = fs::temp_directory_path() / "polaron-test-manifest";
    m.write(dir / "manifest.json");
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK_FALSE(fs::exists(dir / "manifest.json.tmp"));
    std::ifstream in(dir / "manifest.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["verb"] == "selftest");
    CHECK(j["config"]["grid_n"] == "8");
    CHECK(j["checks"].size() == 2);
}
