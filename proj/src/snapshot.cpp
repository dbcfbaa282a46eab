#include "pitcorr/io/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pitcorr::io {

json grid_metadata(const Grid& g) {
    json axes = json::array();
    for (int r = 0; r < g.dim(); ++r) {
        const Axis& a = g.axis(r);
        auto kind = [](const EndCondition& e) {
            return e.is_neumann() ? json("neumann") : json{{"dirichlet", e.value}};
        };
        axes.push_back({{"count", a.count}, {"extent_m", a.extent}, {"spacing_m", a.spacing},
                        {"low", kind(a.bc.low)}, {"high", kind(a.bc.high)}});
    }
    return {{"dim", g.dim()}, {"axes", axes}};
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_snapshot_csv(const FieldPair& s, const Grid& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << (g.dim() == 3 ? "x,y,z,phi,c\n" : "x,y,phi,c\n");
    std::string line;
    for (std::size_t q = 0; q < g.size(); ++q) {
        const auto x = g.coordinates(q);
        line.clear();
        for (int r = 0; r < g.dim(); ++r) {
            line += format_double(x[std::size_t(r)]);
            line += ',';
        }
        line += format_double(s.phi.data()[q]);
        line += ',';
        line += format_double(s.c.data()[q]);
        line += '\n';
        out << line;
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace detail {

void write_le_doubles(std::ostream& out, const double* v, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(v), std::streamsize(n * sizeof(double)));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            auto u = std::bit_cast<std::uint64_t>(v[i]);
            char b[8];
            for (int k = 0; k < 8; ++k) b[k] = char((u >> (8 * k)) & 0xff);
            out.write(b, 8);
        }
    }
}

void read_le_doubles(std::istream& in, double* v, std::size_t n) {
    std::vector<unsigned char> buf(n * 8);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (std::size_t(in.gcount()) != buf.size()) throw std::runtime_error("raw-f64 payload truncated");
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t u = 0;
        for (int k = 0; k < 8; ++k) u |= std::uint64_t(buf[i * 8 + std::size_t(k)]) << (8 * k);
        v[i] = std::bit_cast<double>(u);
    }
}

} // namespace detail

void write_snapshot_raw(const FieldPair& s, const Grid& g, const std::filesystem::path& path,
                        const json& extra) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    json shape = json::array();
    for (int r = 0; r < g.dim(); ++r) shape.push_back(g.axis(r).count);
    json h = {{"format", "pitcorr-raw-f64"}, {"version", 1},     {"t", s.t},
              {"step", s.step_index},        {"shape", shape},   {"order", "x-fastest"},
              {"fields", {"phi", "c"}},      {"grid", grid_metadata(g)}};
    for (auto it = extra.begin(); it != extra.end(); ++it) h[it.key()] = it.value();
    out << h.dump() << '\n';
    detail::write_le_doubles(out, s.phi.data(), g.size());
    detail::write_le_doubles(out, s.c.data(), g.size());
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SnapshotRecord read_snapshot_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    SnapshotRecord r;
    r.header = json::parse(line);
    if (r.header.value("format", "") != "pitcorr-raw-f64") throw std::runtime_error("not a raw-f64 snapshot");
    r.shape = r.header.at("shape").get<std::vector<int>>();
    Eigen::Index rows = r.shape.at(0), cols = 1;
    for (std::size_t k = 1; k < r.shape.size(); ++k) cols *= r.shape[k];
    r.state.phi.resize(rows, cols);
    r.state.c.resize(rows, cols);
    detail::read_le_doubles(in, r.state.phi.data(), std::size_t(rows * cols));
    detail::read_le_doubles(in, r.state.c.data(), std::size_t(rows * cols));
    r.state.t = r.header.at("t").get<double>();
    r.state.step_index = r.header.at("step").get<long>();
    return r;
}

FieldPair read_snapshot_csv(const std::filesystem::path& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    FieldPair s{Eigen::MatrixXd(g.rows(), g.cols()), Eigen::MatrixXd(g.rows(), g.cols())};
    for (std::size_t q = 0; q < g.size(); ++q) {
        if (!std::getline(in, line)) throw std::runtime_error("CSV snapshot truncated: " + path.string());
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
        if (int(v.size()) != g.dim() + 2) throw std::runtime_error("CSV snapshot: bad column count");
        s.phi.data()[q] = v[std::size_t(g.dim())];
        s.c.data()[q] = v[std::size_t(g.dim()) + 1];
    }
    return s;
}

void export_snapshot(const FieldPair& s, const Grid& g, SnapshotFormat f, const std::filesystem::path& path,
                     const json& extra) {
    if (f == SnapshotFormat::Csv)
        write_snapshot_csv(s, g, path);
    else
        write_snapshot_raw(s, g, path, extra);
}

} // namespace pitcorr::io
