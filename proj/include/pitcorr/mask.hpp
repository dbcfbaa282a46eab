#pragma once

#include "pitcorr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pitcorr {

/// Whether nodes on a shape boundary belong to the hole.
enum class Membership { Closed, Open };

/// Disk (2D) or ball (3D). Coordinates in metres.
struct Circle {
    std::vector<double> center;
    double radius = 0.0;
    Membership membership = Membership::Closed;
};

/// Solid cylinder between two axis points with flat caps.
struct CylinderSegment {
    std::array<double, 3> p0{};
    std::array<double, 3> p1{};
    double radius = 0.0;
    Membership membership = Membership::Closed;
};

/// Seeded piecewise-linear height profile H(s) along `along_axis`; nodes whose
/// `height_axis` coordinate is >= H belong to the hole.
struct RoughEdgeProfile {
    int along_axis = 0;
    int height_axis = 1;
    double base = 0.0;        ///< mean height [m]
    double amplitude = 0.0;   ///< knot heights vary within base +- amplitude
    double wavelength = 1.0;  ///< knot spacing [m]
    std::uint64_t seed = 0;
    Membership membership = Membership::Closed;

    /// Knot heights at s = k * wavelength, k = 0..count-1.
    [[nodiscard]] std::vector<double> knots(double length) const {
        const auto count = std::size_t(std::ceil(length / wavelength)) + 2;
        std::mt19937_64 rng(seed);
        std::vector<double> h(count);
        // Explicit mapping of raw engine output; distribution objects are not portable.
        for (auto& v : h) {
            const double u = double(rng() >> 11) * 0x1.0p-53;
            v = base + amplitude * (2.0 * u - 1.0);
        }
        return h;
    }

    [[nodiscard]] static double height_at(const std::vector<double>& knots, double wavelength, double s) {
        const double q = std::max(0.0, s / wavelength);
        const auto k = std::min(std::size_t(q), knots.size() - 2);
        const double f = q - double(k);
        return knots[k] + f * (knots[k + 1] - knots[k]);
    }
};

using Shape = std::variant<Circle, CylinderSegment, RoughEdgeProfile>;

/// Node indicator of the hole set Theta with boundary-layer caches.
struct DomainMask {
    std::vector<std::uint8_t> theta;          ///< 1 on Theta
    std::vector<std::size_t> theta_nodes;     ///< ascending
    std::vector<std::size_t> theta_boundary;  ///< Theta nodes with a neighbour outside Theta
    std::vector<std::size_t> omega_boundary;  ///< non-Theta nodes with a neighbour in Theta

    [[nodiscard]] bool empty() const noexcept { return theta_nodes.empty(); }
    [[nodiscard]] bool in_theta(std::size_t p) const { return theta[p] != 0; }
    [[nodiscard]] bool operator==(const DomainMask&) const = default;
};

namespace detail {

template <class F>
void for_each_neighbour(const Grid& g, std::size_t p, F&& f) {
    const auto idx = g.multi_index(p);
    for (int r = 0; r < g.dim(); ++r) {
        const int i = idx[std::size_t(r)];
        const std::size_t s = g.stride(r);
        if (i > 0) f(p - s, r, i, -1);
        if (i + 1 < g.axis(r).count) f(p + s, r, i, +1);
    }
}

inline bool inside(const Circle& c, const std::array<double, 3>& x, int dim, double tol) {
    double d2 = 0.0;
    for (int r = 0; r < dim; ++r) {
        const double d = x[std::size_t(r)] - c.center[std::size_t(r)];
        d2 += d * d;
    }
    return d2 <= (c.radius + tol) * (c.radius + tol);
}

inline bool inside(const CylinderSegment& c, const std::array<double, 3>& x, int dim, double tol) {
    double ax2 = 0.0, t = 0.0;
    std::array<double, 3> a{}, v{};
    for (int r = 0; r < dim; ++r) {
        a[std::size_t(r)] = c.p1[std::size_t(r)] - c.p0[std::size_t(r)];
        v[std::size_t(r)] = x[std::size_t(r)] - c.p0[std::size_t(r)];
        ax2 += a[std::size_t(r)] * a[std::size_t(r)];
        t += a[std::size_t(r)] * v[std::size_t(r)];
    }
    if (ax2 <= 0) return false;
    t /= ax2;
    const double slack = tol / std::sqrt(ax2);
    if (t < -slack || t > 1.0 + slack) return false;
    double d2 = 0.0;
    for (int r = 0; r < dim; ++r) {
        const double d = v[std::size_t(r)] - t * a[std::size_t(r)];
        d2 += d * d;
    }
    return d2 <= (c.radius + tol) * (c.radius + tol);
}

inline void validate_shape(const Grid& g, const Shape& s) {
    const int d = g.dim();
    if (const auto* c = std::get_if<Circle>(&s)) {
        if (int(c->center.size()) != d) throw std::invalid_argument("circle: center dimension mismatch");
        if (!(c->radius > 0)) throw std::invalid_argument("circle: radius must be positive");
    } else if (const auto* cy = std::get_if<CylinderSegment>(&s)) {
        if (!(cy->radius > 0)) throw std::invalid_argument("cylinder_segment: radius must be positive");
    } else if (const auto* p = std::get_if<RoughEdgeProfile>(&s)) {
        if (p->along_axis < 0 || p->along_axis >= d || p->height_axis < 0 || p->height_axis >= d ||
            p->along_axis == p->height_axis)
            throw std::invalid_argument("rough_edge_profile: invalid axes");
        if (!(p->wavelength > 0) || p->amplitude < 0)
            throw std::invalid_argument("rough_edge_profile: wavelength must be positive, amplitude non-negative");
    }
}

} // namespace detail

/// Rasterizes the union of shapes onto the grid nodes. Membership tests carry a
/// 1e-9*h slack: boundary nodes count as inside for closed shapes, outside for open ones.
inline DomainMask rasterize_mask(const Grid& g, const std::vector<Shape>& shapes) {
    DomainMask m;
    m.theta.assign(g.size(), 0);
    const double tol = 1e-9 * g.min_spacing();
    for (std::size_t si = 0; si < shapes.size(); ++si) {
        const Shape& s = shapes[si];
        detail::validate_shape(g, s);
        std::size_t hits = 0;
        if (const auto* p = std::get_if<RoughEdgeProfile>(&s)) {
            const double st = p->membership == Membership::Open ? -tol : tol;
            const auto kn = p->knots(g.axis(p->along_axis).extent);
            for (std::size_t q = 0; q < g.size(); ++q) {
                const auto x = g.coordinates(q);
                const double h = RoughEdgeProfile::height_at(kn, p->wavelength, x[std::size_t(p->along_axis)]);
                if (x[std::size_t(p->height_axis)] >= h - st) {
                    m.theta[q] = 1;
                    ++hits;
                }
            }
        } else {
            for (std::size_t q = 0; q < g.size(); ++q) {
                const auto x = g.coordinates(q);
                const bool in = std::visit(
                    [&](const auto& sh) {
                        using T = std::decay_t<decltype(sh)>;
                        if constexpr (std::is_same_v<T, RoughEdgeProfile>) return false;
                        else return detail::inside(sh, x, g.dim(), sh.membership == Membership::Open ? -tol : tol);
                    },
                    s);
                if (in) {
                    m.theta[q] = 1;
                    ++hits;
                }
            }
        }
        if (hits == 0)
            throw std::invalid_argument("rasterize_mask: shape " + std::to_string(si) + " covers no grid node");
    }
    for (std::size_t q = 0; q < g.size(); ++q) {
        bool touches_other = false;
        detail::for_each_neighbour(g, q, [&](std::size_t nb, int, int, int) {
            if (m.theta[nb] != m.theta[q]) touches_other = true;
        });
        if (m.theta[q]) {
            m.theta_nodes.push_back(q);
            if (touches_other) m.theta_boundary.push_back(q);
        } else if (touches_other) {
            m.omega_boundary.push_back(q);
        }
    }
    return m;
}

inline DomainMask empty_mask(const Grid& g) {
    DomainMask m;
    m.theta.assign(g.size(), 0);
    return m;
}

} // namespace pitcorr
