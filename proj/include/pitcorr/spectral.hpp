#pragma once

#include "pitcorr/errors.hpp"
#include "pitcorr/laplacian.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace pitcorr {

/// Process-wide counters for benchmarking and refactorization checks.
struct Instrumentation {
    std::atomic<long> factorizations{0};
    std::atomic<long> solves{0};

    void reset() noexcept {
        factorizations = 0;
        solves = 0;
    }
};

inline Instrumentation& instrumentation() {
    static Instrumentation inst;
    return inst;
}

/// M = Gamma * diag(lambda) * GammaInv, eigenvalues ascending.
struct SpectralFactorization {
    Eigen::MatrixXd Gamma;
    Eigen::MatrixXd GammaInv;
    Eigen::VectorXd lambda;

    [[nodiscard]] int size() const noexcept { return int(lambda.size()); }
    [[nodiscard]] double spectral_radius() const { return lambda.cwiseAbs().maxCoeff(); }
};

namespace detail {

/// sin(pi n / d) with the argument reduced in integers to [0, pi/2].
inline double sin_pi_ratio(long n, long d) {
    n %= 2 * d;
    double sign = 1.0;
    if (n > d) {
        n -= d;
        sign = -1.0;
    }
    if (2 * n > d) n = d - n;
    return sign * std::sin(std::numbers::pi * double(n) / double(d));
}

inline SpectralFactorization dirichlet_sine_basis(int m, double dr) {
    SpectralFactorization f;
    f.lambda.resize(m);
    f.Gamma.resize(m, m);
    const double norm = std::sqrt(2.0 / double(m + 1));
    for (int c = 0; c < m; ++c) {
        const int k = m - c;  // ascending eigenvalues: largest wavenumber first
        const double s = sin_pi_ratio(k, 2L * (m + 1));
        f.lambda[c] = -4.0 / (dr * dr) * s * s;
        for (int i = 0; i < m; ++i) f.Gamma(i, c) = norm * sin_pi_ratio(long(i + 1) * k, m + 1);
    }
    f.GammaInv = f.Gamma.transpose();
    return f;
}

/// Diagonal similarity to a symmetric tridiagonal matrix, then a symmetric
/// tridiagonal eigensolve. Works on the unit-spacing matrix and rescales.
inline SpectralFactorization symmetrized_eigen(const Laplacian1D& L) {
    const int m = L.m;
    const double s2 = L.dr * L.dr;
    Eigen::VectorXd d(m), diag(m), off(m - 1);
    d[0] = 1.0;
    for (int i = 0; i + 1 < m; ++i) {
        const double u = L.upper[i] * s2, l = L.lower[i] * s2;
        if (!(u * l > 0)) throw NumericalError("spectral_factorize: off-diagonal product must be positive");
        d[i + 1] = d[i] * std::sqrt(l / u);
        off[i] = std::sqrt(u * l);
    }
    for (int i = 0; i < m; ++i) diag[i] = L.diag[i] * s2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalError("spectral_factorize: tridiagonal eigensolver failed");
    SpectralFactorization f;
    f.lambda = es.eigenvalues() / s2;
    const Eigen::MatrixXd& Q = es.eigenvectors();
    f.Gamma = d.asDiagonal() * Q;
    f.GammaInv = Q.transpose() * d.cwiseInverse().asDiagonal();
    return f;
}

} // namespace detail

inline SpectralFactorization spectral_factorize(const Laplacian1D& L) {
    if (L.m < 2) throw std::invalid_argument("spectral_factorize: m must be >= 2");
    ++instrumentation().factorizations;
    SpectralFactorization f = (L.low == BoundaryKind::Dirichlet && L.high == BoundaryKind::Dirichlet)
                                  ? detail::dirichlet_sine_basis(L.m, L.dr)
                                  : detail::symmetrized_eigen(L);
    const Eigen::MatrixXd M = L.dense();
    const double res = (f.Gamma * f.lambda.asDiagonal() * f.GammaInv - M).cwiseAbs().rowwise().sum().maxCoeff();
    if (!(res <= 1e-10 * L.inf_norm()))
        throw NumericalError("spectral_factorize: reconstruction residual " + std::to_string(res));
    return f;
}

using FactorizationPtr = std::shared_ptr<const SpectralFactorization>;

/// Reusable scratch buffers for Sylvester solves.
struct SolveWorkspace {
    Eigen::MatrixXd t1, t2;
};

/// Solver for (a I + b M) vec(X) = vec(Y) where M is the Kronecker sum of the
/// per-axis Laplacians. Data are x-fastest (see Grid). 2D: (aI + bMx)X + bXMy^T = Y.
/// 3D: a mode-3 transform splits the problem into nz shifted 2D Sylvester problems.
class SylvesterOperator {
public:
    SylvesterOperator(double a, double b, FactorizationPtr fx, FactorizationPtr fy, FactorizationPtr fz = nullptr)
        : a_(a), b_(b), fx_(std::move(fx)), fy_(std::move(fy)), fz_(std::move(fz)) {
        if (!fx_ || !fy_) throw std::invalid_argument("SylvesterOperator: missing factorization");
        nx_ = fx_->size();
        ny_ = fy_->size();
        nz_ = fz_ ? fz_->size() : 1;
        GyInvT_ = fy_->GammaInv.transpose();
        GyT_ = fy_->Gamma.transpose();
        if (fz_) {
            GzInvT_ = fz_->GammaInv.transpose();
            GzT_ = fz_->Gamma.transpose();
        }
        upsilon_.resize(nx_, Eigen::Index(ny_) * nz_);
        // eigenvalues carry rounding of order eps * rho, so a numerically zero mode is not exactly 0
        const double scale =
            std::abs(a_) + std::abs(b_) * (fx_->spectral_radius() + fy_->spectral_radius() +
                                           (fz_ ? fz_->spectral_radius() : 0.0));
        for (int k = 0; k < nz_; ++k) {
            const double shift = a_ + (fz_ ? b_ * fz_->lambda[k] : 0.0);
            for (int j = 0; j < ny_; ++j)
                for (int i = 0; i < nx_; ++i) {
                    const double den = shift + b_ * fx_->lambda[i] + b_ * fy_->lambda[j];
                    if (!(std::abs(den) > 1e-12 * scale) || !std::isfinite(den))
                        throw NumericalError("SylvesterOperator: singular shifted eigenvalue");
                    upsilon_(i, j + Eigen::Index(ny_) * k) = 1.0 / den;
                }
        }
    }

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] int dim() const noexcept { return fz_ ? 3 : 2; }
    [[nodiscard]] const Eigen::MatrixXd& upsilon() const noexcept { return upsilon_; }
    [[nodiscard]] const FactorizationPtr& fx() const noexcept { return fx_; }
    [[nodiscard]] const FactorizationPtr& fy() const noexcept { return fy_; }
    [[nodiscard]] const FactorizationPtr& fz() const noexcept { return fz_; }

    /// X = solution for right-hand side Y (both nx-by-(ny*nz)); X may not alias Y.
    void solve(const Eigen::MatrixXd& Y, Eigen::MatrixXd& X, SolveWorkspace& ws) const {
        if (Y.rows() != nx_ || Y.cols() != Eigen::Index(ny_) * nz_)
            throw std::invalid_argument("SylvesterOperator::solve: dimension mismatch");
        ++instrumentation().solves;
        const Eigen::Index nxy = Eigen::Index(nx_) * ny_;
        ws.t1.resize(nx_, Eigen::Index(ny_) * nz_);
        ws.t2.resize(nx_, Eigen::Index(ny_) * nz_);
        X.resize(nx_, Eigen::Index(ny_) * nz_);
        const double* src = Y.data();
        if (fz_) {
            Eigen::Map<Eigen::MatrixXd>(ws.t2.data(), nxy, nz_).noalias() =
                Eigen::Map<const Eigen::MatrixXd>(Y.data(), nxy, nz_) * GzInvT_;
            src = ws.t2.data();
        }
        ws.t1.noalias() = fx_->GammaInv * Eigen::Map<const Eigen::MatrixXd>(src, nx_, Eigen::Index(ny_) * nz_);
        for (int k = 0; k < nz_; ++k) X.middleCols(Eigen::Index(ny_) * k, ny_).noalias() = ws.t1.middleCols(Eigen::Index(ny_) * k, ny_) * GyInvT_;
        X.array() *= upsilon_.array();
        for (int k = 0; k < nz_; ++k) ws.t1.middleCols(Eigen::Index(ny_) * k, ny_).noalias() = X.middleCols(Eigen::Index(ny_) * k, ny_) * GyT_;
        if (fz_) {
            ws.t2.noalias() = fx_->Gamma * ws.t1;
            Eigen::Map<Eigen::MatrixXd>(X.data(), nxy, nz_).noalias() =
                Eigen::Map<const Eigen::MatrixXd>(ws.t2.data(), nxy, nz_) * GzT_;
        } else {
            X.noalias() = fx_->Gamma * ws.t1;
        }
    }

    [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& Y) const {
        SolveWorkspace ws;
        Eigen::MatrixXd X;
        solve(Y, X, ws);
        return X;
    }

private:
    double a_, b_;
    FactorizationPtr fx_, fy_, fz_;
    int nx_ = 0, ny_ = 0, nz_ = 1;
    Eigen::MatrixXd GyInvT_, GyT_, GzInvT_, GzT_;
    Eigen::MatrixXd upsilon_;
};

/// One-shot 2D solve of (aI + bMx)X + bXMy^T = Y.
inline Eigen::MatrixXd sylvester_solve(const SylvesterOperator& op, const Eigen::MatrixXd& Y) {
    if (op.dim() != 2) throw std::invalid_argument("sylvester_solve: operator is 3D");
    return op.solve(Y);
}

/// One-shot 3D solve; G is the nx-by-(ny*nz) unfolding of the tensor.
inline Eigen::MatrixXd solve_3d(double a, double b, const Laplacian1D& Mx, const Laplacian1D& My,
                                const Laplacian1D& Mz, const Eigen::MatrixXd& G) {
    if (G.rows() != Mx.m || G.cols() != Eigen::Index(My.m) * Mz.m)
        throw std::invalid_argument("solve_3d: dimension mismatch");
    const SylvesterOperator op(a, b, std::make_shared<const SpectralFactorization>(spectral_factorize(Mx)),
                               std::make_shared<const SpectralFactorization>(spectral_factorize(My)),
                               std::make_shared<const SpectralFactorization>(spectral_factorize(Mz)));
    return op.solve(G);
}

/// Per-axis factorizations of a grid Laplacian, computed once and shared by operators.
struct GridFactorizations {
    FactorizationPtr fx, fy, fz;

    explicit GridFactorizations(const GridLaplacian& lap)
        : fx(std::make_shared<const SpectralFactorization>(spectral_factorize(lap.axis(0)))),
          fy(std::make_shared<const SpectralFactorization>(spectral_factorize(lap.axis(1)))),
          fz(lap.dim() == 3 ? std::make_shared<const SpectralFactorization>(spectral_factorize(lap.axis(2))) : nullptr) {}

    [[nodiscard]] SylvesterOperator make_operator(double a, double b) const { return {a, b, fx, fy, fz}; }

    /// Largest |eigenvalue| of the Kronecker sum.
    [[nodiscard]] double spectral_radius() const {
        double r = fx->spectral_radius() + fy->spectral_radius();
        if (fz) r += fz->spectral_radius();
        return r;
    }
};

} // namespace pitcorr
