#pragma once

#include "pitcorr/boundary.hpp"
#include "pitcorr/correction.hpp"
#include "pitcorr/errors.hpp"
#include "pitcorr/model.hpp"
#include "pitcorr/spectral.hpp"
#include "pitcorr/state.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace pitcorr {

struct SchemeConfig {
    SchemeOrder order = SchemeOrder::Euler;
    double dt = 1e-3;
    double w = 4.43e8;

    void validate() const {
        if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("SchemeConfig: dt must be positive");
        if (!(w >= 0) || !std::isfinite(w)) throw std::invalid_argument("SchemeConfig: w must be non-negative");
    }
};

/// Euler start-up for two-step schemes: ceil(4/dt) substeps summing exactly to dt.
struct BootstrapRule {
    long substeps;
    double substep;
};

inline BootstrapRule bootstrap_rule(double dt) {
    const double q = 4.0 / dt;
    const long n = std::max(1L, long(std::ceil(q * (1.0 - 1e-12))));
    return {n, dt / double(n)};
}

/// Grid, Laplacian, spectral factorizations and boundary data shared by every
/// operator of a run. Factorizations are computed once here.
class Discretization {
public:
    Discretization(const Grid& g, const CorrosionParameters& p, BoundaryData bd)
        : grid_(g), lap_(g), facts_(std::make_shared<const GridFactorizations>(lap_)), params_(p),
          bdata_(std::move(bd)) {
        params_.validate();
        bdata_.validate(grid_);
        has_psi_ = !bdata_.homogeneous(params_);
        timed_ = bdata_.time_dependent();
        if (has_psi_ && !timed_) {
            psi_phi_ = boundary_contribution(grid_, bdata_, BoundaryField::Phi, 0.0, params_);
            psi_c_ = boundary_contribution(grid_, bdata_, BoundaryField::C, 0.0, params_) +
                     boundary_contribution(grid_, bdata_, BoundaryField::F2, 0.0, params_);
        }
    }
    Discretization(const Grid& g, const CorrosionParameters& p) : Discretization(g, p, BoundaryData::from_grid(g)) {}

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const GridLaplacian& laplacian() const noexcept { return lap_; }
    [[nodiscard]] const GridFactorizations& factorizations() const noexcept { return *facts_; }
    [[nodiscard]] const CorrosionParameters& params() const noexcept { return params_; }
    [[nodiscard]] const BoundaryData& boundary() const noexcept { return bdata_; }
    [[nodiscard]] bool has_boundary_terms() const noexcept { return has_psi_; }

    /// Psi_phi(t), or nullptr when identically zero. `buf` backs time-dependent data.
    const Eigen::MatrixXd* psi_phi(double t, Eigen::MatrixXd& buf) const {
        if (!has_psi_) return nullptr;
        if (!timed_) return &psi_phi_;
        buf = boundary_contribution(grid_, bdata_, BoundaryField::Phi, t, params_);
        return &buf;
    }
    /// Psi_c(t) + Psi_F2(t), or nullptr when identically zero.
    const Eigen::MatrixXd* psi_c(double t, Eigen::MatrixXd& buf) const {
        if (!has_psi_) return nullptr;
        if (!timed_) return &psi_c_;
        buf = boundary_contribution(grid_, bdata_, BoundaryField::C, t, params_) +
              boundary_contribution(grid_, bdata_, BoundaryField::F2, t, params_);
        return &buf;
    }

private:
    Grid grid_;
    GridLaplacian lap_;
    std::shared_ptr<const GridFactorizations> facts_;
    CorrosionParameters params_;
    BoundaryData bdata_;
    bool has_psi_ = false;
    bool timed_ = false;
    Eigen::MatrixXd psi_phi_, psi_c_;
};

/// Sylvester operators of one scheme and step size.
struct StepOperators {
    SchemeOrder order;
    double dt;
    double w;
    SylvesterOperator phi;
    SylvesterOperator c;
};

inline StepOperators make_step_operators(const Discretization& d, SchemeOrder order, double dt, double w) {
    const auto& p = d.params();
    const auto& f = d.factorizations();
    if (order == SchemeOrder::Euler)
        return {order, dt, w, f.make_operator(1.0 + w * dt, -dt * p.D_phi), f.make_operator(1.0, -dt * p.D_c)};
    return {order, dt, w, f.make_operator(3.0 + 2.0 * w * dt, -2.0 * dt * p.D_phi),
            f.make_operator(3.0, -2.0 * dt * p.D_c)};
}

/// Scratch storage reused across steps.
struct StepWorkspace {
    SolveWorkspace solve;
    Eigen::MatrixXd inner, rhs, f1a, f1b, f2, lf2, psi_buf;
};

namespace detail {

inline void f1_field(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& c, const CorrosionParameters& p,
                     Eigen::MatrixXd& out) {
    out.resize(phi.rows(), phi.cols());
    const Eigen::Index n = phi.size();
    for (Eigen::Index i = 0; i < n; ++i) out.data()[i] = reaction_f1(phi.data()[i], c.data()[i], p);
}

/// inner = D_phi Psi + w phi + F1(phi, c)
inline void phi_inner_euler(const FieldPair& s, double w, const CorrosionParameters& p,
                            const Eigen::MatrixXd* psi, StepWorkspace& ws) {
    f1_field(s.phi, s.c, p, ws.f1a);
    ws.inner.resize(s.phi.rows(), s.phi.cols());
    const Eigen::Index n = s.phi.size();
    const double* ph = s.phi.data();
    const double* f = ws.f1a.data();
    double* o = ws.inner.data();
    if (psi) {
        const double* ps = psi->data();
        for (Eigen::Index i = 0; i < n; ++i) o[i] = p.D_phi * ps[i] + w * ph[i] + f[i];
    } else {
        for (Eigen::Index i = 0; i < n; ++i) o[i] = w * ph[i] + f[i];
    }
}

/// rhs = phi + dt (inner - D_phi corr)
inline void phi_rhs_euler(const Eigen::MatrixXd& phi, double dt, double D, const Eigen::MatrixXd& inner,
                          const Eigen::VectorXd* corr, Eigen::MatrixXd& rhs) {
    rhs.resize(phi.rows(), phi.cols());
    const Eigen::Index n = phi.size();
    if (corr)
        for (Eigen::Index i = 0; i < n; ++i) rhs.data()[i] = phi.data()[i] + dt * (inner.data()[i] - D * (*corr)[i]);
    else
        for (Eigen::Index i = 0; i < n; ++i) rhs.data()[i] = phi.data()[i] + dt * inner.data()[i];
}

/// inner = 2 F1(1) + 2 w phi1 - F1(0) - w phi0 [+ D_phi Psi]
inline void phi_inner_2sbdf(const FieldPair& s0, const FieldPair& s1, double w, const CorrosionParameters& p,
                            const Eigen::MatrixXd* psi, StepWorkspace& ws) {
    f1_field(s0.phi, s0.c, p, ws.f1a);
    f1_field(s1.phi, s1.c, p, ws.f1b);
    ws.inner.resize(s1.phi.rows(), s1.phi.cols());
    const Eigen::Index n = s1.phi.size();
    const double *p0 = s0.phi.data(), *p1 = s1.phi.data(), *fa = ws.f1a.data(), *fb = ws.f1b.data();
    double* o = ws.inner.data();
    for (Eigen::Index i = 0; i < n; ++i) o[i] = 2.0 * fb[i] + 2.0 * w * p1[i] - fa[i] - w * p0[i];
    if (psi)
        for (Eigen::Index i = 0; i < n; ++i) o[i] += p.D_phi * psi->data()[i];
}

/// rhs = 4 phi1 - phi0 + 2 dt (inner - D corr)
inline void phi_rhs_2sbdf(const Eigen::MatrixXd& u0, const Eigen::MatrixXd& u1, double dt, double D,
                      const Eigen::MatrixXd& inner, const Eigen::VectorXd* corr, Eigen::MatrixXd& rhs) {
    rhs.resize(u1.rows(), u1.cols());
    const Eigen::Index n = u1.size();
    const double *a = u0.data(), *b = u1.data(), *in = inner.data();
    double* o = rhs.data();
    if (corr)
        for (Eigen::Index i = 0; i < n; ++i) o[i] = 4.0 * b[i] - a[i] + 2.0 * dt * (in[i] - D * (*corr)[i]);
    else
        for (Eigen::Index i = 0; i < n; ++i) o[i] = 4.0 * b[i] - a[i] + 2.0 * dt * in[i];
}

/// lf2 = (M [- (N1 + N2)]) F2(phi) [+ Psi_c + Psi_F2]
inline void c_inner(const Discretization& d, const Eigen::MatrixXd& phi_new, const Eigen::MatrixXd* psi,
                    const SparseMatrix* nsum, StepWorkspace& ws) {
    const auto& p = d.params();
    ws.f2.resize(phi_new.rows(), phi_new.cols());
    for (Eigen::Index i = 0; i < phi_new.size(); ++i) ws.f2.data()[i] = reaction_f2(phi_new.data()[i], p);
    ws.lf2.resize(phi_new.rows(), phi_new.cols());
    d.laplacian().apply(ws.f2.data(), ws.lf2.data());
    if (nsum) ws.lf2.reshaped() -= (*nsum) * ws.f2.reshaped();
    if (psi) ws.lf2 += *psi;
}

/// rhs = c + dt D_c (lf2 - corr)
inline void c_rhs_euler(const Eigen::MatrixXd& c, double dtD, const Eigen::MatrixXd& lf2, const Eigen::VectorXd* corr,
                        Eigen::MatrixXd& rhs) {
    rhs.resize(c.rows(), c.cols());
    const Eigen::Index n = c.size();
    if (corr)
        for (Eigen::Index i = 0; i < n; ++i) rhs.data()[i] = c.data()[i] + dtD * (lf2.data()[i] - (*corr)[i]);
    else
        for (Eigen::Index i = 0; i < n; ++i) rhs.data()[i] = c.data()[i] + dtD * lf2.data()[i];
}

/// rhs = 4 c1 - c0 + 2 dt D_c (lf2 - corr)
inline void c_rhs_2sbdf(const Eigen::MatrixXd& c0, const Eigen::MatrixXd& c1, double dtD, const Eigen::MatrixXd& lf2,
                        const Eigen::VectorXd* corr, Eigen::MatrixXd& rhs) {
    rhs.resize(c1.rows(), c1.cols());
    const Eigen::Index n = c1.size();
    const double *a = c0.data(), *b = c1.data(), *l = lf2.data();
    double* o = rhs.data();
    if (corr)
        for (Eigen::Index i = 0; i < n; ++i) o[i] = 4.0 * b[i] - a[i] + 2.0 * dtD * (l[i] - (*corr)[i]);
    else
        for (Eigen::Index i = 0; i < n; ++i) o[i] = 4.0 * b[i] - a[i] + 2.0 * dtD * l[i];
}

inline void check_finite(const FieldPair& s) {
    if (!s.all_finite())
        throw InstabilityError("non-finite field values at t = " + std::to_string(s.t) +
                               " (time step too large or relaxation too small)");
}

} // namespace detail

/// One relaxed IMEX Euler step: phi first, then c with F2(phi^{n+1}).
inline FieldPair step_imex_euler_rect(const FieldPair& s, const StepOperators& ops, const Discretization& d,
                                      StepWorkspace& ws) {
    if (ops.order != SchemeOrder::Euler) throw std::invalid_argument("step_imex_euler_rect: operators are not Euler");
    const auto& p = d.params();
    const double dt = ops.dt;
    const double t1 = s.t + dt;
    FieldPair out;
    out.t = t1;
    out.step_index = s.step_index + 1;
    detail::phi_inner_euler(s, ops.w, p, d.psi_phi(t1, ws.psi_buf), ws);
    detail::phi_rhs_euler(s.phi, dt, p.D_phi, ws.inner, nullptr, ws.rhs);
    ops.phi.solve(ws.rhs, out.phi, ws.solve);
    detail::c_inner(d, out.phi, d.psi_c(t1, ws.psi_buf), nullptr, ws);
    detail::c_rhs_euler(s.c, dt * p.D_c, ws.lf2, nullptr, ws.rhs);
    ops.c.solve(ws.rhs, out.c, ws.solve);
    detail::check_finite(out);
    return out;
}

inline FieldPair step_imex_euler_rect(const FieldPair& s, const StepOperators& ops, const Discretization& d) {
    StepWorkspace ws;
    return step_imex_euler_rect(s, ops, d, ws);
}

/// One relaxed IMEX 2SBDF step from (n, n+1) to n+2.
inline FieldPair step_imex_2sbdf_rect(const FieldPair& s0, const FieldPair& s1, const StepOperators& ops,
                                      const Discretization& d, StepWorkspace& ws) {
    if (ops.order != SchemeOrder::TwoSBDF) throw std::invalid_argument("step_imex_2sbdf_rect: operators are not 2SBDF");
    if (std::abs(s0.t + ops.dt - s1.t) > 1e-9 * std::max(ops.dt, std::abs(s1.t)))
        throw std::invalid_argument("step_imex_2sbdf_rect: states are not one step apart");
    const auto& p = d.params();
    const double dt = ops.dt;
    const double t2 = s1.t + dt;
    FieldPair out;
    out.t = t2;
    out.step_index = s1.step_index + 1;
    detail::phi_inner_2sbdf(s0, s1, ops.w, p, d.psi_phi(t2, ws.psi_buf), ws);
    detail::phi_rhs_2sbdf(s0.phi, s1.phi, dt, p.D_phi, ws.inner, nullptr, ws.rhs);
    ops.phi.solve(ws.rhs, out.phi, ws.solve);
    detail::c_inner(d, out.phi, d.psi_c(t2, ws.psi_buf), nullptr, ws);
    detail::c_rhs_2sbdf(s0.c, s1.c, dt * p.D_c, ws.lf2, nullptr, ws.rhs);
    ops.c.solve(ws.rhs, out.c, ws.solve);
    detail::check_finite(out);
    return out;
}

inline FieldPair step_imex_2sbdf_rect(const FieldPair& s0, const FieldPair& s1, const StepOperators& ops,
                                      const Discretization& d) {
    StepWorkspace ws;
    return step_imex_2sbdf_rect(s0, s1, ops, d, ws);
}

/// Second starting value for 2SBDF by fine Euler substeps.
inline std::pair<FieldPair, FieldPair> bootstrap_2sbdf(const FieldPair& s0, const SchemeConfig& cfg,
                                                       const Discretization& d) {
    const BootstrapRule rule = bootstrap_rule(cfg.dt);
    const StepOperators fine = make_step_operators(d, SchemeOrder::Euler, rule.substep, cfg.w);
    StepWorkspace ws;
    FieldPair cur = s0;
    for (long k = 0; k < rule.substeps; ++k) {
        cur = step_imex_euler_rect(cur, fine, d, ws);
        cur.t = s0.t + double(k + 1) * rule.substep;
    }
    cur.t = s0.t + cfg.dt;
    cur.step_index = s0.step_index + 1;
    return {s0, std::move(cur)};
}

/// Callbacks fired during a run.
struct RunHooks {
    std::vector<double> snapshot_times;                          ///< snapped to the nearest step
    std::function<void(const FieldPair&)> on_snapshot;
    std::function<void(const FieldPair&, double wall_ms)> on_step;
};

struct RunResult {
    FieldPair final_state;
    long steps = 0;
    double wall_seconds = 0.0;
};

/// Step count for a horizon that must be an integer multiple of dt.
inline long horizon_steps(double T, double dt) {
    if (!(T >= 0)) throw std::invalid_argument("horizon must be non-negative");
    const double q = T / dt;
    const long n = std::lround(q);
    if (std::abs(double(n) * dt - T) > 1e-12 * std::max(T, dt) * 1e3)
        throw std::invalid_argument("horizon " + std::to_string(T) + " is not a multiple of dt " + std::to_string(dt));
    return n;
}

namespace detail {

/// Maps snapshot times to step indices (nearest completed step).
inline std::vector<long> snapshot_steps(const std::vector<double>& times, double dt, long N) {
    std::vector<long> s;
    for (double t : times) s.push_back(std::clamp(std::lround(t / dt), 0L, N));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

/// Shared driver: `first` produces level 1 from level 0, `next` level n+1 from (n-1, n).
template <class First, class Next>
RunResult drive(const FieldPair& state0, double dt, long N, const RunHooks& hooks, First&& first, Next&& next) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto snaps = snapshot_steps(hooks.snapshot_times, dt, N);
    std::size_t si = 0;
    auto emit = [&](const FieldPair& s) {
        while (si < snaps.size() && snaps[si] == s.step_index) {
            if (hooks.on_snapshot) hooks.on_snapshot(s);
            ++si;
        }
    };
    FieldPair prev, cur = state0;
    cur.step_index = 0;
    emit(cur);
    for (long n = 0; n < N; ++n) {
        const auto t0 = clock::now();
        FieldPair nxt = n == 0 ? first(cur) : next(prev, cur);
        nxt.step_index = n + 1;
        nxt.t = state0.t + double(n + 1) * dt;
        const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        prev = std::move(cur);
        cur = std::move(nxt);
        if (hooks.on_step) hooks.on_step(cur, ms);
        emit(cur);
    }
    return {std::move(cur), N, std::chrono::duration<double>(clock::now() - start).count()};
}

} // namespace detail

/// Runs a rectangular-domain simulation to horizon T.
inline RunResult run_rect(const FieldPair& state0, const SchemeConfig& cfg, const Discretization& d, double T,
                          const RunHooks& hooks = {}) {
    cfg.validate();
    const long N = horizon_steps(T, cfg.dt);
    const StepOperators ops = make_step_operators(d, cfg.order, cfg.dt, cfg.w);
    StepWorkspace ws;
    if (cfg.order == SchemeOrder::Euler) {
        auto step = [&](const FieldPair& s) { return step_imex_euler_rect(s, ops, d, ws); };
        return detail::drive(state0, cfg.dt, N, hooks, step, [&](const FieldPair&, const FieldPair& s) { return step(s); });
    }
    return detail::drive(
        state0, cfg.dt, N, hooks, [&](const FieldPair& s) { return bootstrap_2sbdf(s, cfg, d).second; },
        [&](const FieldPair& a, const FieldPair& b) { return step_imex_2sbdf_rect(a, b, ops, d, ws); });
}

} // namespace pitcorr
