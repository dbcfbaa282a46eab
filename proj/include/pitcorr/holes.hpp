#pragma once

#include "pitcorr/correction.hpp"
#include "pitcorr/rect.hpp"

#include <chrono>
#include <limits>
#include <string>

namespace pitcorr {

enum class IterVariant { ImexI, ImexE };
enum class StopMode { FullCriteria, ReducedSingleIteration };

inline const char* to_string(IterVariant v) { return v == IterVariant::ImexI ? "imex_i" : "imex_e"; }

struct IterSchemeConfig {
    IterVariant variant = IterVariant::ImexE;
    SchemeOrder order = SchemeOrder::Euler;
    double dt = 2e-3;
    double w = 4.43e8;
    double eps1 = 1e-4;
    double eps2 = 1e-3;
    double eps3 = 1e-8;
    StopMode stop_mode = StopMode::FullCriteria;
    int max_iters = 500;

    void validate() const {
        SchemeConfig{order, dt, w}.validate();
        if (!(eps1 > 0 && eps2 > 0 && eps3 > 0)) throw std::invalid_argument("IterSchemeConfig: tolerances must be positive");
        if (max_iters < 1) throw std::invalid_argument("IterSchemeConfig: max_iters must be >= 1");
    }
    [[nodiscard]] SchemeConfig scheme() const { return {order, dt, w}; }
};

/// Per-step iteration statistics.
struct IterationReport {
    long step = 0;
    double t = 0.0;
    int k_phi = 0;
    int k_c = 0;
    double res_phi = 0.0;  ///< last max |increment| on Omega-hat (all nodes in reduced c-loop)
    double res_c = 0.0;
    double max_phi_theta = 0.0;
    double max_c_theta = 0.0;
    double wall_ms = 0.0;
};

/// Masked-domain data: mask and correction operators. The phi reaction term is
/// evaluated on every node; it vanishes at phi = 0 and damps residuals in Theta.
class HoleDiscretization {
public:
    HoleDiscretization(const Discretization& d, DomainMask mask)
        : d_(&d), mask_(std::move(mask)), ops_(build_correction_matrices(d.grid(), mask_)) {
        nsum_ = ops_.N1 + ops_.N2;
    }

    [[nodiscard]] const Discretization& base() const noexcept { return *d_; }
    [[nodiscard]] const DomainMask& mask() const noexcept { return mask_; }
    [[nodiscard]] const CorrectionOperators& corrections() const noexcept { return ops_; }
    [[nodiscard]] const SparseMatrix& n_sum() const noexcept { return nsum_; }

    /// N of the fixed-point iteration.
    [[nodiscard]] const SparseMatrix& N(IterVariant v) const noexcept { return v == IterVariant::ImexI ? nsum_ : ops_.N1; }
    /// G (lagged part), or nullptr.
    [[nodiscard]] const SparseMatrix* G(IterVariant v) const noexcept { return v == IterVariant::ImexI ? nullptr : &ops_.N2; }

private:
    const Discretization* d_;
    DomainMask mask_;
    CorrectionOperators ops_;
    SparseMatrix nsum_;
};

/// Increment statistics between two iterates.
struct IterateDelta {
    double max_delta_omega = 0.0;  ///< max |next - prev| over Omega-hat
    double max_delta_all = 0.0;    ///< max |next - prev| over every node
    double max_abs_theta = 0.0;    ///< max |next| over Theta
    double max_delta_theta = 0.0;  ///< max |next - prev| over Theta
};

inline IterateDelta iterate_delta(const Eigen::MatrixXd& prev, const Eigen::MatrixXd& next, const DomainMask& mask) {
    IterateDelta r;
    const Eigen::Index n = next.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = std::abs(next.data()[i] - prev.data()[i]);
        if (mask.theta[std::size_t(i)]) {
            r.max_delta_theta = std::max(r.max_delta_theta, d);
            r.max_abs_theta = std::max(r.max_abs_theta, std::abs(next.data()[i]));
        } else {
            r.max_delta_omega = std::max(r.max_delta_omega, d);
        }
        r.max_delta_all = std::max(r.max_delta_all, d);
    }
    return r;
}

/// Full stopping rule with time fraction t/T (= n/N).
inline bool check_stop_criteria(const IterateDelta& d, const IterSchemeConfig& cfg, double time_fraction) {
    return d.max_delta_omega < cfg.eps1 &&
           (d.max_abs_theta < time_fraction * cfg.eps2 || d.max_delta_theta < cfg.eps3);
}

inline bool check_stop_criteria(const Eigen::MatrixXd& prev, const Eigen::MatrixXd& next, const DomainMask& mask,
                                const IterSchemeConfig& cfg, long n, long N) {
    if (N <= 0) throw std::invalid_argument("check_stop_criteria: N must be positive");
    return check_stop_criteria(iterate_delta(prev, next, mask), cfg, double(n) / double(N));
}

/// Max |phi| and |c| over Theta.
inline std::pair<double, double> theta_error(const FieldPair& s, const DomainMask& mask) {
    if (mask.empty()) throw std::invalid_argument("theta_error: empty Theta");
    double a = 0.0, b = 0.0;
    for (std::size_t q : mask.theta_nodes) {
        a = std::max(a, std::abs(s.phi.data()[q]));
        b = std::max(b, std::abs(s.c.data()[q]));
    }
    return {a, b};
}

namespace detail {

/// Fixed-point loop u^{k+1} = solve(rhs(N u^k + g_fixed)).
template <class Rhs>
int iterate_fixed_point(const SylvesterOperator& op, const SparseMatrix& N, const Eigen::VectorXd* g_fixed,
                        Eigen::MatrixXd& u, Rhs&& make_rhs, const IterSchemeConfig& cfg, bool reduced_single,
                        bool reduced_all_nodes, double frac, const DomainMask& mask, StepWorkspace& ws,
                        double& residual, const char* what) {
    Eigen::VectorXd corr(u.size());
    Eigen::MatrixXd next;
    for (int k = 1; k <= cfg.max_iters; ++k) {
        corr.noalias() = N * u.reshaped();
        if (g_fixed) corr += *g_fixed;
        make_rhs(corr);
        op.solve(ws.rhs, next, ws.solve);
        if (!next.allFinite()) throw InstabilityError(std::string("non-finite iterate in ") + what + " loop");
        const IterateDelta d = iterate_delta(u, next, mask);
        residual = reduced_all_nodes ? d.max_delta_all : d.max_delta_omega;
        std::swap(u, next);
        if (reduced_single) return k;
        const bool stop = reduced_all_nodes ? d.max_delta_all < cfg.eps1 : check_stop_criteria(d, cfg, frac);
        if (stop) return k;
    }
    throw NonConvergenceError(std::string(what) + " iterations exceeded max_iters = " + std::to_string(cfg.max_iters) +
                                  " (last residual " + std::to_string(residual) + ")",
                              residual);
}

inline void finish_report(IterationReport& r, const FieldPair& s, const DomainMask& mask) {
    r.step = s.step_index;
    r.t = s.t;
    if (!mask.empty()) std::tie(r.max_phi_theta, r.max_c_theta) = theta_error(s, mask);
}

} // namespace detail

/// One iterative IMEX-I/E Euler step. `time_fraction` is t^{n+1}/T for the stop rule.
inline std::pair<FieldPair, IterationReport> step_iter_euler(const FieldPair& s, const IterSchemeConfig& cfg,
                                                             const HoleDiscretization& h, const StepOperators& ops,
                                                             double time_fraction, StepWorkspace& ws) {
    if (ops.order != SchemeOrder::Euler) throw std::invalid_argument("step_iter_euler: operators are not Euler");
    const auto t0 = std::chrono::steady_clock::now();
    const Discretization& d = h.base();
    const auto& p = d.params();
    const double dt = ops.dt;
    const double t1 = s.t + dt;
    const bool reduced = cfg.stop_mode == StopMode::ReducedSingleIteration;
    const SparseMatrix& N = h.N(cfg.variant);
    const SparseMatrix* G = h.G(cfg.variant);
    IterationReport rep;
    FieldPair out;
    out.t = t1;
    out.step_index = s.step_index + 1;

    detail::phi_inner_euler(s, ops.w, p, d.psi_phi(t1, ws.psi_buf), ws);
    std::optional<Eigen::VectorXd> g_phi;
    if (G) g_phi = (*G) * s.phi.reshaped();
    out.phi = s.phi;
    rep.k_phi = detail::iterate_fixed_point(
        ops.phi, N, g_phi ? &*g_phi : nullptr, out.phi,
        [&](const Eigen::VectorXd& corr) { detail::phi_rhs_euler(s.phi, dt, p.D_phi, ws.inner, &corr, ws.rhs); }, cfg,
        reduced, false, time_fraction, h.mask(), ws, rep.res_phi, "phi");

    detail::c_inner(d, out.phi, d.psi_c(t1, ws.psi_buf), &h.n_sum(), ws);
    std::optional<Eigen::VectorXd> g_c;
    if (G) g_c = (*G) * s.c.reshaped();
    out.c = s.c;
    const double dtD = dt * p.D_c;
    rep.k_c = detail::iterate_fixed_point(
        ops.c, N, g_c ? &*g_c : nullptr, out.c,
        [&](const Eigen::VectorXd& corr) { detail::c_rhs_euler(s.c, dtD, ws.lf2, &corr, ws.rhs); }, cfg, false,
        reduced, time_fraction, h.mask(), ws, rep.res_c, "c");

    detail::finish_report(rep, out, h.mask());
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(out), rep};
}

/// One iterative IMEX-I/E 2SBDF step from (n, n+1) to n+2.
inline std::pair<FieldPair, IterationReport> step_iter_2sbdf(const FieldPair& s0, const FieldPair& s1,
                                                             const IterSchemeConfig& cfg, const HoleDiscretization& h,
                                                             const StepOperators& ops, double time_fraction,
                                                             StepWorkspace& ws) {
    if (ops.order != SchemeOrder::TwoSBDF) throw std::invalid_argument("step_iter_2sbdf: operators are not 2SBDF");
    const auto t0 = std::chrono::steady_clock::now();
    const Discretization& d = h.base();
    const auto& p = d.params();
    const double dt = ops.dt;
    const double t2 = s1.t + dt;
    const bool reduced = cfg.stop_mode == StopMode::ReducedSingleIteration;
    const SparseMatrix& N = h.N(cfg.variant);
    const SparseMatrix* G = h.G(cfg.variant);
    IterationReport rep;
    FieldPair out;
    out.t = t2;
    out.step_index = s1.step_index + 1;

    detail::phi_inner_2sbdf(s0, s1, ops.w, p, d.psi_phi(t2, ws.psi_buf), ws);
    std::optional<Eigen::VectorXd> g_phi;
    if (G) g_phi = (*G) * (2.0 * s1.phi - s0.phi).reshaped();
    out.phi = s1.phi;
    rep.k_phi = detail::iterate_fixed_point(
        ops.phi, N, g_phi ? &*g_phi : nullptr, out.phi,
        [&](const Eigen::VectorXd& corr) { detail::phi_rhs_2sbdf(s0.phi, s1.phi, dt, p.D_phi, ws.inner, &corr, ws.rhs); },
        cfg, reduced, false, time_fraction, h.mask(), ws, rep.res_phi, "phi");

    detail::c_inner(d, out.phi, d.psi_c(t2, ws.psi_buf), &h.n_sum(), ws);
    std::optional<Eigen::VectorXd> g_c;
    if (G) g_c = (*G) * (2.0 * s1.c - s0.c).reshaped();
    out.c = s1.c;
    const double dtD = dt * p.D_c;
    rep.k_c = detail::iterate_fixed_point(
        ops.c, N, g_c ? &*g_c : nullptr, out.c,
        [&](const Eigen::VectorXd& corr) { detail::c_rhs_2sbdf(s0.c, s1.c, dtD, ws.lf2, &corr, ws.rhs); }, cfg, false,
        reduced, time_fraction, h.mask(), ws, rep.res_c, "c");

    detail::finish_report(rep, out, h.mask());
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(out), rep};
}

/// Reduced mode dispatch: one phi iteration, c iterated to eps1 on all nodes.
inline std::pair<FieldPair, IterationReport> step_reduced_mode(const FieldPair& s, IterSchemeConfig cfg,
                                                               const HoleDiscretization& h, const StepOperators& ops,
                                                               double time_fraction, StepWorkspace& ws) {
    cfg.stop_mode = StopMode::ReducedSingleIteration;
    return step_iter_euler(s, cfg, h, ops, time_fraction, ws);
}

/// Zeroes both fields on Theta.
inline void apply_hole_initial(FieldPair& s, const DomainMask& mask) {
    for (std::size_t q : mask.theta_nodes) {
        s.phi.data()[q] = 0.0;
        s.c.data()[q] = 0.0;
    }
}

/// Runs an iterative masked-domain simulation to horizon T.
inline RunResult run_holes(const FieldPair& state0, const IterSchemeConfig& cfg, const HoleDiscretization& h, double T,
                           const RunHooks& hooks = {},
                           const std::function<void(const IterationReport&)>& on_report = {}) {
    cfg.validate();
    const long N = horizon_steps(T, cfg.dt);
    const Discretization& d = h.base();
    const StepOperators ops = make_step_operators(d, cfg.order, cfg.dt, cfg.w);
    StepWorkspace ws;
    auto report = [&](const IterationReport& r) {
        if (on_report) on_report(r);
    };
    auto euler = [&](const FieldPair& s) {
        auto [nx, rep] = step_iter_euler(s, cfg, h, ops, double(s.step_index + 1) / double(N), ws);
        report(rep);
        return nx;
    };
    if (cfg.order == SchemeOrder::Euler)
        return detail::drive(state0, cfg.dt, N, hooks, euler, [&](const FieldPair&, const FieldPair& s) { return euler(s); });

    auto bootstrap = [&](const FieldPair& s0) {
        const BootstrapRule rule = bootstrap_rule(cfg.dt);
        const StepOperators fine = make_step_operators(d, SchemeOrder::Euler, rule.substep, cfg.w);
        IterSchemeConfig fc = cfg;
        fc.order = SchemeOrder::Euler;
        fc.dt = rule.substep;
        FieldPair cur = s0;
        IterationReport total;
        for (long k = 0; k < rule.substeps; ++k) {
            auto [nx, rep] = step_iter_euler(cur, fc, h, fine, double(k + 1) / (double(rule.substeps) * double(N)), ws);
            cur = std::move(nx);
            cur.t = s0.t + double(k + 1) * rule.substep;
            total.k_phi += rep.k_phi;
            total.k_c += rep.k_c;
            total.res_phi = rep.res_phi;
            total.res_c = rep.res_c;
            total.wall_ms += rep.wall_ms;
        }
        cur.t = s0.t + cfg.dt;
        cur.step_index = s0.step_index + 1;
        detail::finish_report(total, cur, h.mask());
        report(total);
        return cur;
    };
    return detail::drive(state0, cfg.dt, N, hooks, bootstrap, [&](const FieldPair& a, const FieldPair& b) {
        auto [nx, rep] = step_iter_2sbdf(a, b, cfg, h, ops, double(b.step_index + 1) / double(N), ws);
        report(rep);
        return nx;
    });
}

} // namespace pitcorr
