// SPDX-License-Identifier: Apache-2.0

///
/// \file io.hpp
///
/// File formats.
///
/// Binary containers (snapshots and models) are one line of compact JSON
/// header terminated by '\n', followed by the payload: complex numbers as
/// interleaved (real, imaginary) little-endian IEEE-754 doubles, matrices in
/// column-major order. The header's dimensions must account for the payload
/// length exactly.
///
///   snapshot  {"format":"cfsa-snapshot","version":1,"n":..,"N":..,"dtype":..}
///             payload: N columns of n complex values
///   model     {"format":"cfsa-model","version":1,"n":..,"m":..,"k":..,
///              "alpha":..,"s1":..,"dtype":..}
///             payload: U (n x m) followed by Z (n x m)
///
/// The CSV snapshot form has 2n rows of N comma-separated values: the real
/// parts of x_1..x_N in rows 1..n, the imaginary parts in rows n+1..2n. An
/// optional leading "# cfsa-snapshot v1 n=<n> N=<N>" line carries the shape
/// (needed when N = 0).
///
#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfsa/engine.hpp"
#include "cfsa/errors.hpp"
#include "cfsa/matrix_kernel.hpp"
#include "cfsa/pseudospectra.hpp"
#include "cfsa/snapshot.hpp"

namespace cfsa::io {

inline constexpr int              kFormatVersion = 1;
inline constexpr std::string_view kComplexDtype  = "complex128-le-interleaved";

namespace detail {

inline std::uint64_t to_little_endian(std::uint64_t bits)
{
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t out = 0;
        for (int i = 0; i < 8; ++i) {
            out = (out << 8) | ((bits >> (8 * i)) & 0xffu);
        }
        return out;
    } else {
        return bits;
    }
}

inline void put_double(std::string& out, double value)
{
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(value));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.append(bytes, 8);
}

inline double get_double(const char* bytes)
{
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes, 8);
    return std::bit_cast<double>(to_little_endian(bits));
}

inline void put_matrix(std::string& out, const ComplexMatrix& a)
{
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            put_double(out, a(i, j).real());
            put_double(out, a(i, j).imag());
        }
    }
}

inline ComplexMatrix get_matrix(std::string_view payload, std::size_t offset, Eigen::Index rows,
                                Eigen::Index cols)
{
    ComplexMatrix a(rows, cols);
    const char* p = payload.data() + offset;
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            a(i, j) = Complex(get_double(p), get_double(p + 8));
            p += 16;
        }
    }
    return a;
}

inline std::string read_all(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed: " + path);
    }
    return data;
}

inline void write_all(const std::string& path, std::string_view data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

struct Container {
    nlohmann::json   header;
    std::string_view payload;
};

inline Container split_container(std::string_view bytes, std::string_view expected_format)
{
    const auto newline = bytes.find('\n');
    if (bytes.empty() || bytes.front() != '{' || newline == std::string_view::npos) {
        throw IoError("missing JSON header line");
    }
    Container c;
    try {
        c.header = nlohmann::json::parse(bytes.substr(0, newline));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed header: ") + e.what());
    }
    if (c.header.value("format", "") != expected_format) {
        throw IoError("expected a " + std::string(expected_format) + " file");
    }
    if (c.header.value("version", 0) != kFormatVersion) {
        throw IoError("unsupported format version");
    }
    if (c.header.value("dtype", "") != kComplexDtype) {
        throw IoError("unsupported dtype");
    }
    c.payload = bytes.substr(newline + 1);
    return c;
}

inline std::int64_t header_count(const nlohmann::json& header, const char* key, std::int64_t min)
{
    if (!header.contains(key) || !header[key].is_number_integer()) {
        throw IoError(std::string("header field '") + key + "' missing or not an integer");
    }
    const auto v = header[key].get<std::int64_t>();
    if (v < min) {
        throw IoError(std::string("header field '") + key + "' out of range");
    }
    return v;
}

inline void append_number(std::string& out, double value)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, res.ptr);
}

inline double parse_number(std::string_view field)
{
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw IoError("bad number in CSV: '" + std::string(field) + "'");
    }
    return value;
}

} // namespace detail

enum class SnapshotFormat { Binary, Csv };

/// CSV when the path ends in ".csv", binary otherwise.
inline SnapshotFormat format_for_path(const std::string& path)
{
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? SnapshotFormat::Csv
                                                                             : SnapshotFormat::Binary;
}

inline std::string encode_snapshots(const SnapshotMatrix& x)
{
    nlohmann::json header = {{"format", "cfsa-snapshot"}, {"version", kFormatVersion},
                             {"n", x.state_dim()},        {"N", x.count()},
                             {"dtype", kComplexDtype}};
    std::string out = header.dump();
    out.push_back('\n');
    out.reserve(out.size() + static_cast<std::size_t>(x.data().size()) * 16);
    detail::put_matrix(out, x.data());
    return out;
}

inline SnapshotMatrix decode_snapshots(std::string_view bytes)
{
    const auto c = detail::split_container(bytes, "cfsa-snapshot");
    const auto n = detail::header_count(c.header, "n", 1);
    const auto count = detail::header_count(c.header, "N", 0);
    if (c.payload.size() != static_cast<std::size_t>(n * count * 16)) {
        throw IoError("snapshot payload length does not match header dimensions");
    }
    return SnapshotMatrix(detail::get_matrix(c.payload, 0, n, count));
}

inline std::string encode_snapshots_csv(const SnapshotMatrix& x)
{
    const Eigen::Index n = x.state_dim();
    const Eigen::Index count = x.count();
    std::string out = "# cfsa-snapshot v1 n=" + std::to_string(n) + " N=" + std::to_string(count) + "\n";
    if (count == 0) {
        return out;
    }
    for (int part = 0; part < 2; ++part) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < count; ++j) {
                if (j > 0) {
                    out.push_back(',');
                }
                const Complex v = x.data()(i, j);
                detail::append_number(out, part == 0 ? v.real() : v.imag());
            }
            out.push_back('\n');
        }
    }
    return out;
}

inline SnapshotMatrix decode_snapshots_csv(std::string_view text)
{
    std::vector<std::vector<double>> rows;
    std::int64_t declared_n = -1;
    std::int64_t declared_count = -1;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            std::istringstream meta{std::string(line.substr(1))};
            std::string token;
            while (meta >> token) {
                if (token.rfind("n=", 0) == 0) {
                    declared_n = std::stoll(token.substr(2));
                } else if (token.rfind("N=", 0) == 0) {
                    declared_count = std::stoll(token.substr(2));
                }
            }
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            row.push_back(detail::parse_number(line.substr(start, comma == std::string_view::npos
                                                                      ? std::string_view::npos
                                                                      : comma - start)));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw IoError("CSV rows have different lengths");
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) {
        if (declared_n < 1 || declared_count != 0) {
            throw IoError("CSV has no data rows and no usable shape line");
        }
        return SnapshotMatrix(ComplexMatrix(declared_n, 0));
    }
    if (rows.size() % 2 != 0) {
        throw IoError("CSV must have an even number of rows (real block then imaginary block)");
    }
    const auto n = static_cast<Eigen::Index>(rows.size() / 2);
    const auto count = static_cast<Eigen::Index>(rows.front().size());
    if ((declared_n >= 0 && declared_n != n) || (declared_count >= 0 && declared_count != count)) {
        throw IoError("CSV shape line does not match the data");
    }
    ComplexMatrix a(n, count);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < count; ++j) {
            a(i, j) = Complex(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                              rows[static_cast<std::size_t>(i + n)][static_cast<std::size_t>(j)]);
        }
    }
    return SnapshotMatrix(std::move(a));
}

inline void write_snapshots(const std::string& path, const SnapshotMatrix& x)
{
    detail::write_all(path, format_for_path(path) == SnapshotFormat::Csv ? encode_snapshots_csv(x)
                                                                         : encode_snapshots(x));
}

/// Reads either form; a leading '{' selects the binary container.
inline SnapshotMatrix read_snapshots(const std::string& path)
{
    const std::string bytes = detail::read_all(path);
    return !bytes.empty() && bytes.front() == '{' ? decode_snapshots(bytes) : decode_snapshots_csv(bytes);
}

inline std::string encode_model(const CfsaModel& model)
{
    nlohmann::json header = {{"format", "cfsa-model"},
                             {"version", kFormatVersion},
                             {"n", model.n()},
                             {"m", model.m()},
                             {"k", model.k()},
                             {"alpha", model.alpha()},
                             {"s1", model.s1()},
                             {"dtype", kComplexDtype}};
    std::string out = header.dump();
    out.push_back('\n');
    detail::put_matrix(out, model.u());
    detail::put_matrix(out, model.z_hat());
    return out;
}

inline CfsaModel decode_model(std::string_view bytes)
{
    const auto c = detail::split_container(bytes, "cfsa-model");
    const auto n = detail::header_count(c.header, "n", 1);
    const auto m = detail::header_count(c.header, "m", 1);
    const auto k = detail::header_count(c.header, "k", 1);
    if (k > m) {
        throw IoError("model header: k exceeds m");
    }
    if (!c.header.contains("alpha") || !c.header["alpha"].is_number() || !c.header.contains("s1") ||
        !c.header["s1"].is_number()) {
        throw IoError("model header: alpha and s1 must be numbers");
    }
    const auto block = static_cast<std::size_t>(n * m * 16);
    if (c.payload.size() != 2 * block) {
        throw IoError("model payload length does not match header dimensions");
    }
    ComplexMatrix u = detail::get_matrix(c.payload, 0, n, m);
    ComplexMatrix z = detail::get_matrix(c.payload, block, n, m);
    try {
        return CfsaModel(static_cast<int>(k), c.header["alpha"].get<double>(), c.header["s1"].get<double>(),
                         std::move(u), std::move(z));
    } catch (const Error& e) {
        throw IoError(std::string("model file: ") + e.what());
    }
}

inline void write_model(const std::string& path, const CfsaModel& model)
{
    detail::write_all(path, encode_model(model));
}

inline CfsaModel read_model(const std::string& path)
{
    return decode_model(detail::read_all(path));
}

/// "re,im,sigma_min" rows, real index outermost.
inline std::string grid_to_csv(const PseudospectrumGrid& grid)
{
    std::string out = "re,im,sigma_min\n";
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            const Complex z = grid.point(i, j);
            detail::append_number(out, z.real());
            out.push_back(',');
            detail::append_number(out, z.imag());
            out.push_back(',');
            detail::append_number(out, grid.values(i, j));
            out.push_back('\n');
        }
    }
    return out;
}

/// Bounds, resolution, eigenvalues as [re, im] pairs, and `values` as nx rows
/// of ny entries (values[i][j] at re index i, im index j).
inline nlohmann::json grid_to_json(const PseudospectrumGrid& grid, const std::vector<double>& eps_levels = {})
{
    nlohmann::json eigs = nlohmann::json::array();
    for (const Complex& z : grid.eigenvalues) {
        eigs.push_back({z.real(), z.imag()});
    }
    nlohmann::json values = nlohmann::json::array();
    for (int i = 0; i < grid.nx; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < grid.ny; ++j) {
            row.push_back(grid.values(i, j));
        }
        values.push_back(std::move(row));
    }
    nlohmann::json invalid = nlohmann::json::array();
    for (const auto& [i, j] : grid.invalid_points) {
        invalid.push_back({i, j});
    }
    nlohmann::json levels = nlohmann::json::array();
    for (double eps : eps_levels) {
        levels.push_back({{"epsilon", eps}, {"points_inside", level_set_membership(grid, eps).count()}});
    }
    return {{"bounds",
             {{"re_min", grid.bounds.re_min},
              {"re_max", grid.bounds.re_max},
              {"im_min", grid.bounds.im_min},
              {"im_max", grid.bounds.im_max}}},
            {"nx", grid.nx},
            {"ny", grid.ny},
            {"eigenvalues", std::move(eigs)},
            {"values", std::move(values)},
            {"invalid_points", std::move(invalid)},
            {"eps_levels", std::move(levels)}};
}

/// Transition graph of C_{k,m}: j -> j+1 for j < m, and m -> k.
inline std::string gcs_to_dot(const GcsSpec& spec)
{
    std::ostringstream out;
    out << "digraph cfsa {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (int j = 1; j <= spec.n(); ++j) {
        out << "  " << j << ";\n";
    }
    for (int j = 1; j < spec.n(); ++j) {
        out << "  " << j << " -> " << j + 1 << ";\n";
    }
    out << "  " << spec.n() << " -> " << spec.k() << ";\n";
    out << "}\n";
    return out.str();
}

} // namespace cfsa::io
