#pragma once

#include <string_view>
#include <utility>
#include <array>

namespace pitcorr::io {

/// Scenario definitions shipped with the solver (lengths in micrometres).
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 5> builtin_scenarios{{
    {"pencil2d", R"json({
  "name": "pencil2d",
  "description": "25 x 300 um wire exposed at both ends, homogeneous Dirichlet data at the wire ends",
  "grid": {
    "extents_um": [25, 300],
    "spacing_um": 1.0,
    "bc": {
      "x": {"low": "neumann", "high": "neumann"},
      "y": {"low": {"dirichlet": 0.0}, "high": {"dirichlet": 0.0}}
    }
  },
  "geometry": [],
  "initial": {"phi": 1.0, "c": 1.0},
  "scheme": {"order": "euler", "dt": 1e-3, "w": 4.43e8},
  "horizon": 225.0,
  "snapshot_times": [0, 40, 150, 225],
  "outputs": {
    "directory": "pencil2d",
    "formats": ["csv"],
    "front": {"axis": "y", "from": "low", "threshold": 0.5, "interval": 1.0, "fit_window": [20, 225]}
  },
  "reference": {"dt_divisor": 8}
})json"},
    {"circular_pit", R"json({
  "name": "circular_pit",
  "description": "200 x 100 um plate with a 4 um diameter pit at the centre, Neumann outer boundary",
  "grid": {
    "extents_um": [200, 100],
    "spacing_um": 1.0,
    "bc": {
      "x": {"low": "neumann", "high": "neumann"},
      "y": {"low": "neumann", "high": "neumann"}
    }
  },
  "geometry": [{"type": "circle", "center_um": [100, 50], "radius_um": 2.0, "snap_to_node": true, "membership": "open"}],
  "initial": {"phi": 1.0, "c": 1.0},
  "scheme": {"variant": "imex_e", "order": "euler", "dt": 2e-3, "w": 4.43e8,
             "eps": [1e-4, 1e-3, 1e-8], "stop_mode": "full", "max_iters": 500},
  "horizon": 100.0,
  "snapshot_times": [0, 25, 50, 100],
  "outputs": {"directory": "circular_pit", "formats": ["csv"], "iteration_log": true}
})json"},
    {"electropolish", R"json({
  "name": "electropolish",
  "description": "200 x 100 um plate whose top edge is a seeded rough profile; zero data enforced on the edge",
  "grid": {
    "extents_um": [200, 100],
    "spacing_um": 1.0,
    "bc": {
      "x": {"low": "neumann", "high": "neumann"},
      "y": {"low": "neumann", "high": "neumann"}
    }
  },
  "geometry": [{"type": "rough_edge_profile", "along_axis": "x", "height_axis": "y",
                "base_um": 85.0, "amplitude_um": 5.0, "wavelength_um": 10.0, "seed": 2024}],
  "initial": {"phi": 1.0, "c": 1.0},
  "scheme": {"variant": "imex_e", "order": "2sbdf", "dt": 5e-3, "w": 4.43e8,
             "eps": [1e-4, 1e-3, 1e-7], "stop_mode": "full", "max_iters": 500},
  "horizon": 20.0,
  "snapshot_times": [0, 5, 10, 20],
  "outputs": {"directory": "electropolish", "formats": ["csv"], "iteration_log": true}
})json"},
    {"pencil3d", R"json({
  "name": "pencil3d",
  "description": "25 x 25 x 150 um coated wire exposed at the top face",
  "grid": {
    "extents_um": [25, 25, 150],
    "spacing_um": 1.0,
    "bc": {
      "x": {"low": "neumann", "high": "neumann"},
      "y": {"low": "neumann", "high": "neumann"},
      "z": {"low": "neumann", "high": {"dirichlet": 0.0}}
    }
  },
  "geometry": [],
  "initial": {"phi": 1.0, "c": 1.0},
  "scheme": {"order": "2sbdf", "dt": 0.02, "w": 4.43e8},
  "horizon": 225.0,
  "snapshot_times": [0, 40, 150, 225],
  "outputs": {
    "directory": "pencil3d",
    "formats": ["raw-f64"],
    "front": {"axis": "z", "from": "high", "threshold": 0.5, "interval": 1.0, "fit_window": [20, 225]}
  }
})json"},
    {"semicylinder3d", R"json({
  "name": "semicylinder3d",
  "description": "200 x 25 x 100 um block with a 4 um diameter semi-cylindrical cavity along the top centre line",
  "grid": {
    "extents_um": [200, 25, 100],
    "spacing_um": 1.0,
    "bc": {
      "x": {"low": "neumann", "high": "neumann"},
      "y": {"low": "neumann", "high": "neumann"},
      "z": {"low": "neumann", "high": "neumann"}
    }
  },
  "geometry": [{"type": "cylinder_segment", "p0_um": [100, 0, 100], "p1_um": [100, 25, 100], "radius_um": 2.0}],
  "initial": {"phi": 1.0, "c": 1.0},
  "scheme": {"variant": "imex_e", "order": "2sbdf", "dt": 6e-3, "w": 4.43e8,
             "eps": [1e-4, 1e-3, 1e-8], "stop_mode": "full", "max_iters": 500},
  "horizon": 225.0,
  "snapshot_times": [0, 100, 225],
  "outputs": {"directory": "semicylinder3d", "formats": ["raw-f64"], "iteration_log": true}
})json"},
}};

} // namespace pitcorr::io
