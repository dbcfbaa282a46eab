#pragma once

#include "pitcorr/analysis.hpp"
#include "pitcorr/holes.hpp"
#include "pitcorr/io/builtin_scenarios.hpp"
#include "pitcorr/io/snapshot.hpp"
#include "pitcorr/rect.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pitcorr::io {

namespace fs = std::filesystem;
inline constexpr double kMicron = 1e-6;

struct FrontSpec {
    int axis = 1;
    bool from_high = false;
    double threshold = 0.5;
    double interval = 1.0;  ///< sampling period [s]
    std::optional<std::pair<double, double>> fit_window;
};

struct OutputSpec {
    std::string directory;
    bool csv = false;
    bool raw = false;
    bool iteration_log = false;
    std::optional<FrontSpec> front;
};

struct ReferenceSpec {
    int dt_divisor = 1;
    int h_divisor = 1;
};

/// Validated scenario; lengths in metres.
struct ScenarioConfig {
    std::string name;
    std::string description;
    std::vector<double> extents;
    std::vector<double> spacings;
    std::vector<AxisBC> bc;
    std::vector<Shape> shapes;
    std::vector<bool> snap_to_node;  ///< per shape (circles only)
    double phi0 = 1.0;
    double c0 = 1.0;
    IterSchemeConfig scheme;  ///< order/dt/w used by both paths; the rest only with holes
    bool w_auto = false;
    double safety_factor = 1.1;
    CorrosionParameters params;
    double horizon = 0.0;
    std::vector<double> snapshot_times;
    OutputSpec outputs;
    std::optional<ReferenceSpec> reference;
    json source;

    [[nodiscard]] bool has_holes() const noexcept { return !shapes.empty(); }
    [[nodiscard]] int dim() const noexcept { return int(extents.size()); }
};

ScenarioConfig parse_scenario(const json& j);

std::optional<std::string_view> builtin_scenario_text(std::string_view name);

/// Builtin name or path to a JSON file.
ScenarioConfig load_scenario(const std::string& name_or_path);

/// Desk-scale variant: T and snapshot/fit times scaled by s, extents and geometry positions by sqrt(s)
/// (diffusive similarity), spacing unchanged.
ScenarioConfig apply_horizon_scale(ScenarioConfig c, double s);

/// Same scenario on a finer time step and/or grid.
ScenarioConfig refine(ScenarioConfig c, int dt_divisor, int h_divisor);

/// Grid spec with interval counts rounded to the nearest integer (spacing adjusted).
GridSpec grid_spec_of(const ScenarioConfig& c);

/// Grid, mask, discretizations and the initial state of a scenario.
struct ScenarioSetup {
    std::unique_ptr<Discretization> disc;
    std::unique_ptr<HoleDiscretization> holes;
    FieldPair initial;
    double w = 0.0;
    std::vector<Shape> shapes;  ///< after node snapping

    [[nodiscard]] const Grid& grid() const { return disc->grid(); }
};

ScenarioSetup setup_scenario(const ScenarioConfig& c);

struct TimingSummary {
    double wall_seconds = 0.0;
    long steps = 0;
    long factorizations = 0;
    long solves = 0;
    double mean_step_ms = 0.0;
};

struct FrontSample {
    double t;
    double depth;
};

struct ErrorRow {
    double t;
    double err_phi;
    double err_c;
};

struct RunArtifacts {
    FieldPair final_state;
    std::vector<FieldPair> snapshots;
    std::vector<IterationReport> iterations;
    TimingSummary timing;
    std::vector<FrontSample> front;
    std::optional<LinearFit> front_fit;
    std::vector<ErrorRow> errors;
    fs::path output_dir;
    double w = 0.0;
};

struct RunOptions {
    bool write_outputs = true;
    fs::path output_root;                 ///< empty: $PITCORR_OUTPUT_ROOT or ./pitcorr-out
    bool with_reference = true;
    bool keep_snapshots = true;
    std::function<void(const FieldPair&, double)> on_step;
    std::function<void(const IterationReport&)> on_report;
};

fs::path output_root(const RunOptions& o);

json scheme_metadata(const ScenarioConfig& c, double w);

/// Fine-to-coarse restriction by coincident nodes (integer refinement factors).
FieldPair restrict_to(const FieldPair& fine, const Grid& gf, const Grid& gc);

std::string snapshot_stem(const FieldPair& s);

RunArtifacts run_scenario(const ScenarioConfig& c, const RunOptions& opts = {});

/// Runs the refined scenario and stores its snapshots (raw-f64) under <dir>/reference.
std::vector<FieldPair> generate_reference(const ScenarioConfig& c, const RunOptions& opts = {});

enum class ScalingKind { TimeStep, Spacing };

struct ScalingPoint {
    double parameter;
    double wall_seconds;
    long steps;
    std::size_t unknowns;
};

struct ScalingReport {
    ScalingKind kind;
    std::vector<ScalingPoint> points;
    double slope = 0.0;
};

/// Wall time against dt (multipliers of the base step) or h (multipliers of the base spacing).
ScalingReport scaling_report(const ScenarioConfig& base, ScalingKind kind, const std::vector<double>& multipliers);

} // namespace pitcorr::io
