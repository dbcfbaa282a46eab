#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pitcorr {

enum class BoundaryKind { Dirichlet, Neumann };

/// Condition at one end of an axis; `value` is the Dirichlet datum for both fields.
struct EndCondition {
    BoundaryKind kind = BoundaryKind::Dirichlet;
    double value = 0.0;

    static EndCondition dirichlet(double v = 0.0) { return {BoundaryKind::Dirichlet, v}; }
    static EndCondition neumann() { return {BoundaryKind::Neumann, 0.0}; }
    [[nodiscard]] bool is_neumann() const noexcept { return kind == BoundaryKind::Neumann; }
};

struct AxisBC {
    EndCondition low;
    EndCondition high;

    [[nodiscard]] int neumann_ends() const noexcept { return int(low.is_neumann()) + int(high.is_neumann()); }
};

/// Number of mesh intervals on an axis holding `m` unknowns.
[[nodiscard]] inline int axis_intervals(int m, const AxisBC& bc) noexcept { return m + 1 - bc.neumann_ends(); }

/// Geometry and boundary conditions of a structured 2D or 3D grid.
struct GridSpec {
    std::vector<double> extents;        ///< [m]
    std::vector<int> interior_counts;   ///< unknowns per axis, Neumann boundary nodes included
    std::vector<AxisBC> bc;

    void validate() const {
        const std::size_t d = extents.size();
        if (d < 2 || d > 3) throw std::invalid_argument("GridSpec: dimension must be 2 or 3");
        if (interior_counts.size() != d || bc.size() != d)
            throw std::invalid_argument("GridSpec: extents, counts and bc must have equal length");
        for (std::size_t r = 0; r < d; ++r) {
            if (!(extents[r] > 0)) throw std::invalid_argument("GridSpec: extents must be positive");
            if (interior_counts[r] < 2) throw std::invalid_argument("GridSpec: counts must be >= 2");
            if (axis_intervals(interior_counts[r], bc[r]) < 1)
                throw std::invalid_argument("GridSpec: axis has no intervals");
        }
    }

    /// Spec with uniform spacing `h` on every axis; extents must be multiples of h.
    static GridSpec from_spacing(std::vector<double> extents, double h, std::vector<AxisBC> bc) {
        return from_spacings(extents, std::vector<double>(extents.size(), h), std::move(bc));
    }

    static GridSpec from_spacings(std::vector<double> extents, const std::vector<double>& h,
                                  std::vector<AxisBC> bc) {
        if (extents.size() != bc.size() || h.size() != bc.size())
            throw std::invalid_argument("GridSpec: extents, spacings and bc must have equal length");
        GridSpec s{std::move(extents), {}, std::move(bc)};
        for (std::size_t r = 0; r < s.extents.size(); ++r) {
            if (!(h[r] > 0) || !(s.extents[r] > 0)) throw std::invalid_argument("GridSpec: non-positive spacing or extent");
            const double q = s.extents[r] / h[r];
            const long n = std::lround(q);
            if (n < 1 || std::abs(q - double(n)) > 1e-9 * q)
                throw std::invalid_argument("GridSpec: extent " + std::to_string(s.extents[r]) +
                                            " is not a multiple of spacing " + std::to_string(h[r]));
            s.interior_counts.push_back(int(n) - 1 + s.bc[r].neumann_ends());
        }
        s.validate();
        return s;
    }
};

/// One grid axis: unknown nodes sit at (first_node + i) * spacing.
struct Axis {
    int count = 0;
    double extent = 0.0;
    double spacing = 0.0;
    AxisBC bc;

    [[nodiscard]] int first_node() const noexcept { return bc.low.is_neumann() ? 0 : 1; }
    [[nodiscard]] double coordinate(int i) const noexcept { return double(first_node() + i) * spacing; }
};

/// Structured grid. Fields are stored x-fastest: a 2D field is an nx-by-ny column-major
/// matrix, a 3D field the nx-by-(ny*nz) matrix of its mode-1 unfolding.
class Grid {
public:
    explicit Grid(const GridSpec& spec) : spec_(spec) {
        spec_.validate();
        dim_ = int(spec_.extents.size());
        for (int r = 0; r < 3; ++r) {
            Axis& a = axes_[std::size_t(r)];
            if (r < dim_) {
                a.count = spec_.interior_counts[std::size_t(r)];
                a.extent = spec_.extents[std::size_t(r)];
                a.bc = spec_.bc[std::size_t(r)];
                a.spacing = a.extent / double(axis_intervals(a.count, a.bc));
            } else {
                a.count = 1;
            }
        }
    }

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] const Axis& axis(int r) const { return axes_.at(std::size_t(r)); }
    [[nodiscard]] int nx() const noexcept { return axes_[0].count; }
    [[nodiscard]] int ny() const noexcept { return axes_[1].count; }
    [[nodiscard]] int nz() const noexcept { return axes_[2].count; }
    [[nodiscard]] std::size_t size() const noexcept { return std::size_t(nx()) * ny() * nz(); }
    [[nodiscard]] int rows() const noexcept { return nx(); }
    [[nodiscard]] int cols() const noexcept { return ny() * nz(); }
    [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }

    [[nodiscard]] std::size_t index(int i, int j, int k = 0) const noexcept {
        return std::size_t(i) + std::size_t(nx()) * (std::size_t(j) + std::size_t(ny()) * std::size_t(k));
    }
    [[nodiscard]] std::array<int, 3> multi_index(std::size_t p) const noexcept {
        const auto n0 = std::size_t(nx()), n1 = std::size_t(ny());
        return {int(p % n0), int((p / n0) % n1), int(p / (n0 * n1))};
    }
    [[nodiscard]] std::array<double, 3> coordinates(std::size_t p) const noexcept {
        const auto m = multi_index(p);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int r = 0; r < dim_; ++r) x[std::size_t(r)] = axes_[std::size_t(r)].coordinate(m[std::size_t(r)]);
        return x;
    }
    [[nodiscard]] std::size_t stride(int r) const noexcept {
        return r == 0 ? 1 : (r == 1 ? std::size_t(nx()) : std::size_t(nx()) * ny());
    }
    /// 1/dx^2 + 1/dy^2 (+ 1/dz^2).
    [[nodiscard]] double inverse_spacing_sum() const noexcept {
        double s = 0.0;
        for (int r = 0; r < dim_; ++r) s += 1.0 / (axes_[std::size_t(r)].spacing * axes_[std::size_t(r)].spacing);
        return s;
    }
    [[nodiscard]] double min_spacing() const noexcept {
        double h = axes_[0].spacing;
        for (int r = 1; r < dim_; ++r) h = std::min(h, axes_[std::size_t(r)].spacing);
        return h;
    }

private:
    GridSpec spec_;
    int dim_ = 2;
    std::array<Axis, 3> axes_{};
};

inline Grid build_grid(const GridSpec& spec) { return Grid(spec); }

} // namespace pitcorr
