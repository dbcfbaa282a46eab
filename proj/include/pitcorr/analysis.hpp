#pragma once

#include "pitcorr/correction.hpp"
#include "pitcorr/holes.hpp"
#include "pitcorr/spectral.hpp"
#include "pitcorr/state.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pitcorr {

enum class Equation { Phi, C };
enum class GeometryClass { Generic, Circle };

[[nodiscard]] inline double gamma_of(SchemeOrder o) noexcept { return o == SchemeOrder::Euler ? 1.0 : 1.5; }

/// Inputs of the closed-form iteration-matrix bounds.
struct BoundQuery {
    IterVariant variant = IterVariant::ImexE;
    SchemeOrder order = SchemeOrder::Euler;
    BoundaryKind bc_outer = BoundaryKind::Neumann;
    Equation equation = Equation::C;
    std::vector<double> spacings{1e-6, 1e-6};  ///< dx, dy [, dz]
    double dt = 1e-5;
    double w = 4.43e8;
    CorrosionParameters params{};
    GeometryClass geometry = GeometryClass::Generic;
    /// Exact norms of N (N1 for ImexE, N1+N2 for ImexI) and rho(M); replace worst-case constants.
    std::optional<MatrixNorms> norms;
    std::optional<double> rho_M;
};

struct BoundResult {
    bool admissible = true;
    double value = std::numeric_limits<double>::quiet_NaN();
};

/// Coefficients of P = beta I - alpha M per unit time step factor (alpha = D dt, beta = gamma [+ w dt]).
struct IterationCoefficients {
    double alpha;
    double beta;
};

[[nodiscard]] inline IterationCoefficients iteration_coefficients(const BoundQuery& q) {
    const double g = gamma_of(q.order);
    if (q.equation == Equation::Phi) return {q.params.D_phi * q.dt, g + q.w * q.dt};
    return {q.params.D_c * q.dt, g};
}

inline BoundResult bound_spectral_radius(const BoundQuery& q) {
    if (q.spacings.size() < 2 || q.spacings.size() > 3) throw std::invalid_argument("BoundQuery: need 2 or 3 spacings");
    double s = 0.0, h = q.spacings[0];
    for (double d : q.spacings) {
        if (!(d > 0)) throw std::invalid_argument("BoundQuery: spacings must be positive");
        s += 1.0 / (d * d);
        h = std::min(h, d);
    }
    if (!(q.dt > 0)) throw std::invalid_argument("BoundQuery: dt must be positive");
    const auto [a, b] = iteration_coefficients(q);
    const bool neumann = q.bc_outer == BoundaryKind::Neumann;
    const bool nilpotent = q.variant == IterVariant::ImexE;
    if (neumann && b - a * s <= 0) return {false, std::numeric_limits<double>::quiet_NaN()};

    // Circle corollaries use their own h-based constants.
    if (nilpotent && q.geometry == GeometryClass::Circle && !q.norms) {
        const double h2 = h * h, h4 = h2 * h2;
        if (!neumann) return {true, 8.0 * std::sqrt(6.0) * a * a / (h4 * b * (b + 8.0 * a / h2))};
        if (b - 2.0 * a / h2 <= 0) return {false, std::numeric_limits<double>::quiet_NaN()};
        return {true, 2.0 * std::sqrt(6.0) * a * a / (b * h4) * (4.0 / (b + 8.0 * a / h2) + 1.0 / (b - 2.0 * a / h2))};
    }
    const double nu = q.norms ? std::sqrt(q.norms->norm1 * q.norms->norm_inf) : (nilpotent ? 2.0 : 4.0) * s;
    const double rhoM = q.rho_M ? *q.rho_M : 4.0 * s;
    if (!nilpotent) return {true, neumann ? a * nu / (b - a * s) : a * nu / b};
    if (!neumann) return {true, a * a * rhoM * nu / (b * (b + a * rhoM))};
    return {true, a * a * nu / b * (rhoM / (b + a * rhoM) + s / (b - a * s))};
}

struct StepConditions {
    bool unconditional_phi = false;
    double dt_max_phi = std::numeric_limits<double>::infinity();
    double dt_max_c = std::numeric_limits<double>::infinity();
};

/// Sufficient step restrictions for convergence of the inner iterations (h = min spacing).
inline StepConditions sufficient_step_conditions(IterVariant v, SchemeOrder o, BoundaryKind bc,
                                                 const CorrosionParameters& p, double w, double h) {
    if (!(h > 0) || !(w > 0)) throw std::invalid_argument("sufficient_step_conditions: h and w must be positive");
    const double g = gamma_of(o), h2 = h * h;
    const double Dp = p.D_phi, Dc = p.D_c;
    StepConditions r;
    const bool neumann = bc == BoundaryKind::Neumann;
    double kphi = 0.0;  // unconditional when h^2 > kphi * Dp / w
    if (!neumann && v == IterVariant::ImexI) {
        kphi = 8.0;
        r.dt_max_phi = g * h2 / (8.0 * Dp - w * h2);
        r.dt_max_c = g * h2 / (8.0 * Dc);
    } else if (!neumann) {
        kphi = 4.0 * std::sqrt(2.0);
        r.dt_max_phi = g * h2 / (4.0 * std::sqrt(2.0) * Dp - w * h2);
        r.dt_max_c = g * (1.0 + std::sqrt(3.0)) * h2 / (8.0 * Dc);
    } else if (v == IterVariant::ImexI) {
        kphi = 10.0;
        r.dt_max_phi = g * h2 / (10.0 * Dp - w * h2);
        r.dt_max_c = g * h2 / (10.0 * Dc);
    } else {
        kphi = 1.0 + std::sqrt(41.0);
        r.dt_max_phi = g * (std::sqrt(41.0) - 1.0) * h2 / (40.0 * Dp + 2.0 * w * h2);
        r.dt_max_c = g * (std::sqrt(41.0) - 1.0) * h2 / (40.0 * Dc);
    }
    r.unconditional_phi = h2 > kphi * Dp / w;
    if (r.unconditional_phi) r.dt_max_phi = std::numeric_limits<double>::infinity();
    if (neumann) {
        // Admissibility of the Neumann estimates, square spacing: dt D (2/h^2) < gamma [+ w dt].
        const double s = 2.0 / h2;
        if (Dp * s > w) r.dt_max_phi = std::min(r.dt_max_phi, g / (Dp * s - w));
        r.dt_max_c = std::min(r.dt_max_c, g / (Dc * s));
    }
    return r;
}

struct SpectralRadiusEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
    bool dense_fallback = false;
    std::size_t support_size = 0;
};

/// Support-restricted iteration matrix K = -alpha R_S P^{-1} N(:,S), S = column support of N.
/// Its eigenvalues are the nonzero eigenvalues of -alpha P^{-1} N.
inline Eigen::MatrixXd support_iteration_matrix(double alpha, double beta, const GridFactorizations& facts,
                                                const SparseMatrix& N, std::vector<std::ptrdiff_t>* support_out = nullptr) {
    const Eigen::SparseMatrix<double, Eigen::ColMajor, std::ptrdiff_t> Nc(N);
    std::vector<std::ptrdiff_t> S;
    for (std::ptrdiff_t j = 0; j < Nc.outerSize(); ++j)
        if (Nc.outerIndexPtr()[j + 1] > Nc.outerIndexPtr()[j]) S.push_back(j);
    const SylvesterOperator P = facts.make_operator(beta, -alpha);
    const Eigen::Index rows = facts.fx->size();
    const Eigen::Index cols = Eigen::Index(N.rows()) / rows;
    Eigen::MatrixXd K(Eigen::Index(S.size()), Eigen::Index(S.size()));
    Eigen::MatrixXd rhs(rows, cols), x;
    SolveWorkspace ws;
    for (std::size_t c = 0; c < S.size(); ++c) {
        rhs.setZero();
        for (decltype(Nc)::InnerIterator it(Nc, S[c]); it; ++it) rhs.data()[it.row()] = it.value();
        P.solve(rhs, x, ws);
        for (std::size_t r = 0; r < S.size(); ++r) K(Eigen::Index(r), Eigen::Index(c)) = -alpha * x.data()[S[r]];
    }
    if (support_out) *support_out = std::move(S);
    return K;
}

namespace detail {

inline std::optional<double> power_iteration(const Eigen::MatrixXd& K, Eigen::VectorXd v, int cap, int& iters) {
    double prev = -1.0;
    v.normalize();
    for (iters = 1; iters <= cap; ++iters) {
        Eigen::VectorXd y = K * v;
        const double est = y.norm();
        if (est == 0.0) return 0.0;
        v = y / est;
        if (prev > 0 && std::abs(est - prev) < 1e-12 * est) {
            // Confirm with a two-step growth ratio, robust to oscillating complex pairs.
            const double two = std::sqrt((K * (K * v)).norm());
            if (std::abs(two - est) < 1e-9 * est) return est;
        }
        prev = est;
    }
    return std::nullopt;
}

} // namespace detail

/// Spectral radius of -alpha (beta I - alpha M)^{-1} N by power iteration on the support-restricted
/// matrix, with up to three seeds and a dense eigensolve when they fail or disagree.
inline SpectralRadiusEstimate actual_spectral_radius(double alpha, double beta, const GridFactorizations& facts,
                                                     const SparseMatrix& N, int cap = 5000) {
    SpectralRadiusEstimate r;
    if (N.nonZeros() == 0) return r;
    const Eigen::MatrixXd K = support_iteration_matrix(alpha, beta, facts, N);
    r.support_size = std::size_t(K.rows());
    std::vector<double> ests;
    std::mt19937_64 rng(12345);
    for (int restart = 0; restart < 3; ++restart) {
        Eigen::VectorXd v = Eigen::VectorXd::Ones(K.rows());
        if (restart > 0)
            for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = double(rng() >> 11) * 0x1.0p-53 + 0.5;
        int it = 0;
        const auto e = detail::power_iteration(K, v, cap, it);
        r.iterations += it;
        if (!e) break;
        ests.push_back(*e);
    }
    const bool agree = ests.size() == 3 && std::abs(ests[0] - ests[1]) <= 0.01 * ests[0] &&
                       std::abs(ests[0] - ests[2]) <= 0.01 * ests[0];
    if (agree) {
        r.value = ests[0];
        return r;
    }
    r.dense_fallback = true;
    r.converged = false;
    const Eigen::EigenSolver<Eigen::MatrixXd> es(K, false);
    if (es.info() != Eigen::Success) throw NumericalError("actual_spectral_radius: dense eigensolve failed");
    r.value = es.eigenvalues().cwiseAbs().maxCoeff();
    r.converged = true;
    return r;
}

/// Linear least-squares fit y = slope x + intercept with coefficient of determination.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 paired points");
    const double n = double(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

/// Slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("loglog_slope: values must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return linear_fit(lx, ly).slope;
}

/// Distance from the starting end of `axis` to the first threshold crossing of c on the grid
/// centre line, linearly interpolated. A Dirichlet start end contributes its boundary value.
inline double front_position(const FieldPair& s, const Grid& g, int axis, double threshold = 0.5,
                             bool from_high_end = false) {
    if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("front_position: invalid axis");
    const Axis& ax = g.axis(axis);
    std::array<int, 3> idx{g.nx() / 2, g.ny() / 2, g.nz() / 2};
    std::vector<double> pos, val;
    const EndCondition& start = from_high_end ? ax.bc.high : ax.bc.low;
    if (!start.is_neumann()) {
        pos.push_back(from_high_end ? ax.extent : 0.0);
        val.push_back(start.value);
    }
    for (int k = 0; k < ax.count; ++k) {
        const int i = from_high_end ? ax.count - 1 - k : k;
        idx[std::size_t(axis)] = i;
        pos.push_back(ax.coordinate(i));
        val.push_back(s.c.data()[g.index(idx[0], idx[1], idx[2])]);
    }
    const double origin = from_high_end ? ax.extent : 0.0;
    for (std::size_t k = 1; k < val.size(); ++k) {
        if (val[k - 1] < threshold && val[k] >= threshold) {
            const double f = (threshold - val[k - 1]) / (val[k] - val[k - 1]);
            return std::abs(pos[k - 1] + f * (pos[k] - pos[k - 1]) - origin);
        }
    }
    throw std::runtime_error("front_position: no threshold crossing on the probe line");
}

/// Relative Euclidean errors of phi and c.
inline std::pair<double, double> error_norms(const FieldPair& s, const FieldPair& ref) {
    if (s.phi.rows() != ref.phi.rows() || s.phi.cols() != ref.phi.cols() || s.c.size() != ref.c.size())
        throw std::invalid_argument("error_norms: dimension mismatch");
    const double np = ref.phi.norm(), nc = ref.c.norm();
    if (np == 0 || nc == 0) throw std::invalid_argument("error_norms: zero reference norm");
    return {(s.phi - ref.phi).norm() / np, (s.c - ref.c).norm() / nc};
}

} // namespace pitcorr
