#include "polaron/pfld.hpp"

#include "polaron/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace polaron::pfld {
namespace {

static_assert(std::endian::native == std::endian::little, "pfld I/O assumes a little-endian host");

using nlohmann::json;

void write_file(const std::filesystem::path& path, const Header& h, const std::vector<double>& payload) {
    json j;
    j["version"] = h.version;
    j["grid_n"] = h.grid_n;
    j["box_length"] = h.box_length;
    j["dtype"] = h.dtype;
    j["tag"] = h.tag;
    j["shape"] = h.shape;
    j["endianness"] = "little";
    j["payload_bytes"] = payload.size() * sizeof(double);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("pfld: cannot open " + path.string() + " for writing");
    out << j.dump() << '\n';
    out.write(reinterpret_cast<const char*>(payload.data()),
              std::streamsize(payload.size() * sizeof(double)));
    if (!out) throw IoError("pfld: write failed for " + path.string());
}

Header parse_header(std::istream& in, const std::filesystem::path& path, std::size_t* payload_bytes) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("pfld: empty file " + path.string());
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw IoError("pfld: malformed header in " + path.string() + ": " + e.what());
    }
    Header h;
    try {
        h.version = j.at("version").get<int>();
        h.grid_n = j.at("grid_n").get<int>();
        h.box_length = j.at("box_length").get<double>();
        h.dtype = j.at("dtype").get<std::string>();
        h.tag = j.at("tag").get<std::string>();
        h.shape = j.at("shape").get<std::vector<long long>>();
        if (j.value("endianness", "little") != "little") {
            throw IoError("pfld: unsupported endianness in " + path.string());
        }
        if (payload_bytes) *payload_bytes = j.at("payload_bytes").get<std::size_t>();
    } catch (const json::exception& e) {
        throw IoError("pfld: incomplete header in " + path.string() + ": " + e.what());
    }
    if (h.version != 1) throw IoError("pfld: unsupported version in " + path.string());
    if (h.dtype != "c128" && h.dtype != "f64") throw IoError("pfld: unknown dtype " + h.dtype);
    return h;
}

std::vector<double> read_file(const std::filesystem::path& path, Header& h) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("pfld: cannot open " + path.string());
    std::size_t bytes = 0;
    h = parse_header(in, path, &bytes);

    long long count = 1;
    for (long long s : h.shape) count *= s;
    const std::size_t expected = std::size_t(count) * (h.dtype == "c128" ? 2 : 1) * sizeof(double);
    if (bytes != expected) throw IoError("pfld: header shape disagrees with payload size in " + path.string());

    std::vector<double> payload(bytes / sizeof(double));
    in.read(reinterpret_cast<char*>(payload.data()), std::streamsize(bytes));
    if (std::size_t(in.gcount()) != bytes) {
        throw IoError("pfld: truncated payload in " + path.string());
    }
    return payload;
}

std::vector<double> flatten(const Eigen::Ref<const Eigen::VectorXcd>& v, bool as_real) {
    std::vector<double> out;
    out.reserve(std::size_t(v.size()) * (as_real ? 1 : 2));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i].real());
        if (!as_real) out.push_back(v[i].imag());
    }
    return out;
}

Eigen::VectorXcd unflatten(const std::vector<double>& p, bool as_real) {
    const Eigen::Index n = Eigen::Index(as_real ? p.size() : p.size() / 2);
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = as_real ? cd(p[i], 0.0) : cd(p[2 * i], p[2 * i + 1]);
    }
    return v;
}

}  // namespace

Header read_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("pfld: cannot open " + path.string());
    return parse_header(in, path, nullptr);
}

void save_field(const Field& f, const std::filesystem::path& path, const std::string& tag) {
    const bool real = f.values.imag().cwiseAbs().maxCoeff() == 0.0;
    Header h;
    h.grid_n = f.grid.n();
    h.box_length = f.grid.box_length();
    h.dtype = real ? "f64" : "c128";
    h.tag = tag;
    h.shape = {f.grid.n(), f.grid.n(), f.grid.n()};
    write_file(path, h, flatten(f.values, real));
}

Field load_field(const std::filesystem::path& path, const std::optional<Grid3>& expected, Header* header_out) {
    Header h;
    const auto payload = read_file(path, h);
    if (h.shape.size() != 3 || h.grid_n <= 0) {
        throw IoError("pfld: " + path.string() + " does not hold a grid field");
    }
    const Grid3 grid(h.grid_n, h.box_length);
    if (expected && *expected != grid) {
        throw IoError("pfld: grid in " + path.string() + " does not match the target grid");
    }
    if (header_out) *header_out = h;
    return Field(grid, unflatten(payload, h.dtype == "f64"));
}

void save_matrix(const Eigen::MatrixXcd& m, const std::filesystem::path& path, const std::string& tag) {
    Header h;
    h.dtype = "c128";
    h.tag = tag;
    h.shape = {m.rows(), m.cols()};
    Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    write_file(path, h, flatten(Eigen::Map<const Eigen::VectorXcd>(rm.data(), rm.size()), false));
}

Eigen::MatrixXcd load_matrix(const std::filesystem::path& path, Header* header_out) {
    Header h;
    const auto payload = read_file(path, h);
    if (h.shape.size() != 2) throw IoError("pfld: " + path.string() + " does not hold a matrix");
    const Eigen::VectorXcd flat = unflatten(payload, h.dtype == "f64");
    Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm =
        Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            flat.data(), h.shape[0], h.shape[1]);
    if (header_out) *header_out = h;
    return rm;
}

}  // namespace polaron::pfld
