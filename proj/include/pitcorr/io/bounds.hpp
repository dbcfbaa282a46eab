#pragma once

#include "pitcorr/analysis.hpp"
#include "pitcorr/correction.hpp"
#include "pitcorr/mask.hpp"

#include <optional>
#include <vector>

namespace pitcorr::io {

/// Plate with a centred circular pit, used to measure actual iteration-matrix radii.
struct PitGeometry {
    double width = 200e-6;
    double height = 100e-6;
    double radius = 2e-6;
    Membership membership = Membership::Closed;
};

struct BoundsPoint {
    BoundQuery query;
    BoundResult bound;
    std::optional<SpectralRadiusEstimate> actual;
};

/// Grid with uniform spacing h over the plate; interval counts rounded to the nearest integer.
Grid pit_grid(const PitGeometry& geo, double h, BoundaryKind bc);

/// Closed-form bound for q, and optionally the actual radius on the pit geometry
/// (spacing q.spacings[0], pit centre snapped to the nearest node).
BoundsPoint evaluate_bounds(const BoundQuery& q, bool with_actual, const PitGeometry& geo = {});

} // namespace pitcorr::io
