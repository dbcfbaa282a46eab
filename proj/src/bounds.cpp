#include "pitcorr/io/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace pitcorr::io {

Grid pit_grid(const PitGeometry& geo, double h, BoundaryKind bc) {
    const AxisBC a = bc == BoundaryKind::Neumann ? AxisBC{EndCondition::neumann(), EndCondition::neumann()}
                                                  : AxisBC{EndCondition::dirichlet(0.0), EndCondition::dirichlet(0.0)};
    GridSpec s;
    s.extents = {geo.width, geo.height};
    s.bc = {a, a};
    for (double e : s.extents) s.interior_counts.push_back(int(std::lround(e / h)) - 1 + a.neumann_ends());
    return Grid(s);
}

BoundsPoint evaluate_bounds(const BoundQuery& q, bool with_actual, const PitGeometry& geo) {
    BoundsPoint p{q, bound_spectral_radius(q), std::nullopt};
    if (!with_actual || !p.bound.admissible) return p;
    const Grid g = pit_grid(geo, q.spacings[0], q.bc_outer);
    std::vector<double> centre(2);
    for (int r = 0; r < 2; ++r) {
        const Axis& a = g.axis(r);
        const long k = std::lround(0.5 * a.extent / a.spacing) - a.first_node();
        centre[std::size_t(r)] = a.coordinate(int(std::clamp(k, 0L, long(a.count - 1))));
    }
    const DomainMask mask = rasterize_mask(g, {Circle{centre, geo.radius, geo.membership}});
    const CorrectionOperators ops = build_correction_matrices(g, mask);
    const GridLaplacian lap(g);
    const GridFactorizations facts(lap);
    const auto [alpha, beta] = iteration_coefficients(q);
    if (q.variant == IterVariant::ImexE) {
        p.actual = actual_spectral_radius(alpha, beta, facts, ops.N1);
    } else {
        const SparseMatrix n = ops.N1 + ops.N2;
        p.actual = actual_spectral_radius(alpha, beta, facts, n);
    }
    return p;
}

} // namespace pitcorr::io
