#pragma once

#include "pitcorr/laplacian.hpp"
#include "pitcorr/mask.hpp"

#include <Eigen/SparseCore>
#include <vector>

namespace pitcorr {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::ptrdiff_t>;

/// Split of the grid Laplacian M such that M - N1 - N2 vanishes on the rows and
/// columns of Theta and equals M on the Omega-hat block.
struct CorrectionOperators {
    SparseMatrix N1;  ///< Theta rows, Omega-hat neighbour columns
    SparseMatrix N2;  ///< Theta columns of M, every row
};

inline CorrectionOperators build_correction_matrices(const Grid& g, const DomainMask& mask) {
    if (mask.theta.size() != g.size()) throw std::invalid_argument("build_correction_matrices: mask/grid mismatch");
    const GridLaplacian lap(g);
    using Trip = Eigen::Triplet<double, std::ptrdiff_t>;
    std::vector<Trip> t1, t2;
    for (const std::size_t q : mask.theta_nodes) {
        const auto iq = g.multi_index(q);
        t2.emplace_back(std::ptrdiff_t(q), std::ptrdiff_t(q), lap.diagonal_entry(iq));
        detail::for_each_neighbour(g, q, [&](std::size_t p, int r, int i, int step) {
            // M(q,p): row q couples to neighbour p.
            const double m_qp = lap.neighbour_entry(r, i, step);
            // M(p,q): row p couples back to q; p sits at index i+step on axis r.
            const double m_pq = lap.neighbour_entry(r, i + step, -step);
            t2.emplace_back(std::ptrdiff_t(p), std::ptrdiff_t(q), m_pq);
            if (!mask.in_theta(p)) t1.emplace_back(std::ptrdiff_t(q), std::ptrdiff_t(p), m_qp);
        });
    }
    const auto n = std::ptrdiff_t(g.size());
    CorrectionOperators ops{SparseMatrix(n, n), SparseMatrix(n, n)};
    ops.N1.setFromTriplets(t1.begin(), t1.end());
    ops.N2.setFromTriplets(t2.begin(), t2.end());
    ops.N1.makeCompressed();
    ops.N2.makeCompressed();
    return ops;
}

struct MatrixNorms {
    double norm1 = 0.0;    ///< max column abs sum
    double norm_inf = 0.0; ///< max row abs sum
};

inline MatrixNorms mask_norm_bounds(const SparseMatrix& N) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(N.cols());
    MatrixNorms r;
    for (std::ptrdiff_t i = 0; i < N.outerSize(); ++i) {
        double row = 0.0;
        for (SparseMatrix::InnerIterator it(N, i); it; ++it) {
            row += std::abs(it.value());
            col[it.col()] += std::abs(it.value());
        }
        r.norm_inf = std::max(r.norm_inf, row);
    }
    r.norm1 = N.cols() > 0 ? col.maxCoeff() : 0.0;
    return r;
}

} // namespace pitcorr
