#pragma once

#include "pitcorr/grid.hpp"
#include "pitcorr/state.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace pitcorr::io {

using json = nlohmann::json;

enum class SnapshotFormat { Csv, RawF64 };

inline const char* extension(SnapshotFormat f) { return f == SnapshotFormat::Csv ? ".csv" : ".f64"; }

/// Grid description stored alongside snapshots.
json grid_metadata(const Grid& g);

std::string format_double(double v);

/// Writes `x,y[,z],phi,c` rows, x fastest, coordinates in metres.
void write_snapshot_csv(const FieldPair& s, const Grid& g, const std::filesystem::path& path);

/// JSON header line, then phi and c payloads as little-endian float64 in x-fastest order.
void write_snapshot_raw(const FieldPair& s, const Grid& g, const std::filesystem::path& path,
                        const json& extra = json::object());

/// Snapshot read back from disk.
struct SnapshotRecord {
    json header;
    std::vector<int> shape;
    FieldPair state;
};

SnapshotRecord read_snapshot_raw(const std::filesystem::path& path);

/// Reads a CSV snapshot written for grid `g`.
FieldPair read_snapshot_csv(const std::filesystem::path& path, const Grid& g);

void export_snapshot(const FieldPair& s, const Grid& g, SnapshotFormat f, const std::filesystem::path& path,
                     const json& extra = json::object());

} // namespace pitcorr::io
