#pragma once

#include "pitcorr/grid.hpp"
#include "pitcorr/model.hpp"

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace pitcorr {

using EdgeFunction = std::function<double(double)>;

/// Dirichlet data of one axis end for both fields; empty for Neumann ends.
struct EdgeData {
    bool dirichlet = false;
    EdgeFunction phi;
    EdgeFunction c;
    bool time_dependent = false;
    double phi_const = 0.0;
    double c_const = 0.0;

    static EdgeData constant(double phi_value, double c_value) {
        EdgeData e;
        e.dirichlet = true;
        e.phi_const = phi_value;
        e.c_const = c_value;
        e.phi = [phi_value](double) { return phi_value; };
        e.c = [c_value](double) { return c_value; };
        return e;
    }
    static EdgeData timed(EdgeFunction phi_fn, EdgeFunction c_fn) {
        EdgeData e;
        e.dirichlet = true;
        e.time_dependent = true;
        e.phi = std::move(phi_fn);
        e.c = std::move(c_fn);
        return e;
    }
};

enum class BoundaryField { Phi, C, F2 };

/// Dirichlet data per axis (low, high).
struct BoundaryData {
    std::vector<std::array<EdgeData, 2>> edges;

    /// Constant data taken from the grid spec's Dirichlet values.
    static BoundaryData from_grid(const Grid& g) {
        BoundaryData b;
        for (int r = 0; r < g.dim(); ++r) {
            const auto& bc = g.axis(r).bc;
            std::array<EdgeData, 2> e{};
            if (!bc.low.is_neumann()) e[0] = EdgeData::constant(bc.low.value, bc.low.value);
            if (!bc.high.is_neumann()) e[1] = EdgeData::constant(bc.high.value, bc.high.value);
            b.edges.push_back(std::move(e));
        }
        return b;
    }

    void validate(const Grid& g) const {
        if (int(edges.size()) != g.dim()) throw std::invalid_argument("BoundaryData: axis count mismatch");
        for (int r = 0; r < g.dim(); ++r) {
            const auto& bc = g.axis(r).bc;
            if (edges[std::size_t(r)][0].dirichlet == bc.low.is_neumann() ||
                edges[std::size_t(r)][1].dirichlet == bc.high.is_neumann())
                throw std::invalid_argument("BoundaryData: edge kinds disagree with the grid");
        }
    }

    [[nodiscard]] bool time_dependent() const {
        for (const auto& ax : edges)
            for (const auto& e : ax)
                if (e.dirichlet && e.time_dependent) return true;
        return false;
    }

    /// True when every contribution vanishes for all t.
    [[nodiscard]] bool homogeneous(const CorrosionParameters& p) const {
        for (const auto& ax : edges)
            for (const auto& e : ax)
                if (e.dirichlet && (e.time_dependent || e.phi_const != 0.0 || e.c_const != 0.0 ||
                                    reaction_f2(e.phi_const, p) != 0.0))
                    return false;
        return true;
    }
};

/// Known Dirichlet values entering the stencil of the first/last unknown layer, scaled by 1/dr^2.
inline Eigen::MatrixXd boundary_contribution(const Grid& g, const BoundaryData& bd, BoundaryField which, double t,
                                             const CorrosionParameters& p = {}) {
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    for (int r = 0; r < g.dim(); ++r) {
        const Axis& ax = g.axis(r);
        const double s = 1.0 / (ax.spacing * ax.spacing);
        for (int end = 0; end < 2; ++end) {
            const EdgeData& e = bd.edges.at(std::size_t(r))[std::size_t(end)];
            if (!e.dirichlet) continue;
            double v = 0.0;
            switch (which) {
            case BoundaryField::Phi: v = e.phi(t); break;
            case BoundaryField::C: v = e.c(t); break;
            case BoundaryField::F2: v = reaction_f2(e.phi(t), p); break;
            }
            if (v == 0.0) continue;
            const int layer = end == 0 ? 0 : ax.count - 1;
            for (std::size_t q = 0; q < g.size(); ++q)
                if (g.multi_index(q)[std::size_t(r)] == layer) psi.data()[q] += v * s;
        }
    }
    return psi;
}

} // namespace pitcorr
