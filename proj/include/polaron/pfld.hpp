// pfld.hpp: the .pfld array container
//
// Layout: one line of JSON (the header) terminated by '\n', followed directly
// by the payload as little-endian IEEE-754 doubles. Complex payloads (dtype
// "c128") interleave real and imaginary parts. Header keys:
//   version, grid_n, box_length, dtype, tag, shape, endianness, payload_bytes
// Matrices are stored with grid_n = 0 and shape = [rows, cols] (row-major).

#pragma once

#include "polaron/grid.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace polaron::pfld {

struct Header {
    int version{1};
    int grid_n{0};
    double box_length{0.0};
    std::string dtype;  // "c128" or "f64"
    std::string tag;
    std::vector<long long> shape;
};

// Real-valued fields (zero imaginary part) are written as f64.
void save_field(const Field& f, const std::filesystem::path& path, const std::string& tag);

// Loads a field; if `expected` is given, the header must match it.
Field load_field(const std::filesystem::path& path, const std::optional<Grid3>& expected = std::nullopt,
                 Header* header_out = nullptr);

void save_matrix(const Eigen::MatrixXcd& m, const std::filesystem::path& path, const std::string& tag);
Eigen::MatrixXcd load_matrix(const std::filesystem::path& path, Header* header_out = nullptr);

Header read_header(const std::filesystem::path& path);

}  // namespace polaron::pfld
