#pragma once

#include "pitcorr/grid.hpp"

#include <Eigen/Core>
#include <array>
#include <stdexcept>
#include <vector>

namespace pitcorr {

/// Three-point second-difference matrix on one axis. Neumann ends use the
/// ghost-eliminated row with off-diagonal 2/dr^2.
struct Laplacian1D {
    BoundaryKind low = BoundaryKind::Dirichlet;
    BoundaryKind high = BoundaryKind::Dirichlet;
    int m = 0;
    double dr = 1.0;
    Eigen::VectorXd diag;   ///< (i,i)
    Eigen::VectorXd upper;  ///< (i,i+1)
    Eigen::VectorXd lower;  ///< (i+1,i)

    [[nodiscard]] Eigen::MatrixXd dense() const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) M(i, i) = diag[i];
        for (int i = 0; i + 1 < m; ++i) {
            M(i, i + 1) = upper[i];
            M(i + 1, i) = lower[i];
        }
        return M;
    }
    [[nodiscard]] double inf_norm() const {
        double n = 0.0;
        for (int i = 0; i < m; ++i) {
            double s = std::abs(diag[i]);
            if (i + 1 < m) s += std::abs(upper[i]);
            if (i > 0) s += std::abs(lower[i - 1]);
            n = std::max(n, s);
        }
        return n;
    }
};

inline Laplacian1D laplacian_1d(BoundaryKind low, BoundaryKind high, int m, double dr) {
    if (m < 2) throw std::invalid_argument("laplacian_1d: m must be >= 2");
    if (!(dr > 0)) throw std::invalid_argument("laplacian_1d: dr must be positive");
    const double s = 1.0 / (dr * dr);
    Laplacian1D L{low, high, m, dr, Eigen::VectorXd::Constant(m, -2.0 * s),
                  Eigen::VectorXd::Constant(m - 1, s), Eigen::VectorXd::Constant(m - 1, s)};
    if (low == BoundaryKind::Neumann) L.upper[0] = 2.0 * s;
    if (high == BoundaryKind::Neumann) L.lower[m - 2] = 2.0 * s;
    return L;
}

inline Laplacian1D laplacian_1d(const Axis& a) {
    return laplacian_1d(a.bc.low.kind, a.bc.high.kind, a.count, a.spacing);
}

/// Kronecker-sum Laplacian of a grid, applied matrix-free.
class GridLaplacian {
public:
    explicit GridLaplacian(const Grid& g) : dim_(g.dim()), n_{g.nx(), g.ny(), g.nz()} {
        for (int r = 0; r < dim_; ++r) axes_.push_back(laplacian_1d(g.axis(r)));
    }

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] const Laplacian1D& axis(int r) const { return axes_.at(std::size_t(r)); }

    /// Entry M(p,q) for q = p or q a stencil neighbour of p along axis r at 1D index i.
    [[nodiscard]] double neighbour_entry(int r, int i, int step) const {
        const auto& a = axes_[std::size_t(r)];
        return step > 0 ? a.upper[i] : a.lower[i - 1];
    }
    [[nodiscard]] double diagonal_entry(const std::array<int, 3>& idx) const {
        double d = 0.0;
        for (int r = 0; r < dim_; ++r) d += axes_[std::size_t(r)].diag[idx[std::size_t(r)]];
        return d;
    }

    /// out = M u (Mx U + U My^T [+ z-term]) on x-fastest storage.
    void apply(const double* u, double* out) const {
        const int nx = n_[0], ny = n_[1], nz = n_[2];
        const auto& X = axes_[0];
        const auto& Y = axes_[1];
        const std::ptrdiff_t sy = nx, sz = std::ptrdiff_t(nx) * ny;
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                const double* col = u + j * sy + k * sz;
                double* o = out + j * sy + k * sz;
                const double yd = Y.diag[j];
                const double yl = j > 0 ? Y.lower[j - 1] : 0.0;
                const double yu = j + 1 < ny ? Y.upper[j] : 0.0;
                const double* cm = j > 0 ? col - sy : col;
                const double* cp = j + 1 < ny ? col + sy : col;
                o[0] = X.diag[0] * col[0] + X.upper[0] * col[1];
                for (int i = 1; i + 1 < nx; ++i)
                    o[i] = X.lower[i - 1] * col[i - 1] + X.diag[i] * col[i] + X.upper[i] * col[i + 1];
                o[nx - 1] = X.lower[nx - 2] * col[nx - 2] + X.diag[nx - 1] * col[nx - 1];
                for (int i = 0; i < nx; ++i) o[i] += yl * cm[i] + yd * col[i] + yu * cp[i];
                if (dim_ == 3) {
                    const auto& Z = axes_[2];
                    const double zd = Z.diag[k];
                    const double zl = k > 0 ? Z.lower[k - 1] : 0.0;
                    const double zu = k + 1 < nz ? Z.upper[k] : 0.0;
                    const double* zm = k > 0 ? col - sz : col;
                    const double* zp = k + 1 < nz ? col + sz : col;
                    for (int i = 0; i < nx; ++i) o[i] += zl * zm[i] + zd * col[i] + zu * zp[i];
                }
            }
        }
    }

    [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& U) const {
        Eigen::MatrixXd out(U.rows(), U.cols());
        apply(U.data(), out.data());
        return out;
    }

private:
    int dim_;
    std::array<int, 3> n_;
    std::vector<Laplacian1D> axes_;
};

} // namespace pitcorr
