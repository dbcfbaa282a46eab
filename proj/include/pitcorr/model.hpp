#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace pitcorr {

/// Physical constants of the corrosion model (SI units).
struct CorrosionParameters {
    double L = 2.0;          ///< interface kinetics [m^3/(J s)]
    double A = 5.35e7;       ///< free energy curvature [J/mol]
    double D_phi = 6.02e-6;  ///< phase diffusion [m^2/s]
    double D_c = 8.50e-10;   ///< concentration diffusion [m^2/s]
    double c_L = 3.57e-2;    ///< normalized liquid equilibrium concentration
    double omega = 2.08e6;   ///< double-well height [J/m^3]

    void validate() const {
        if (!(L > 0 && A > 0 && D_phi > 0 && D_c > 0 && omega > 0))
            throw std::invalid_argument("CorrosionParameters: all coefficients must be positive");
        if (!(c_L > 0 && c_L < 1))
            throw std::invalid_argument("CorrosionParameters: c_L must lie in (0,1)");
    }

    [[nodiscard]] bool is_default() const noexcept {
        const CorrosionParameters d{};
        return L == d.L && A == d.A && D_phi == d.D_phi && D_c == d.D_c && c_L == d.c_L &&
               omega == d.omega;
    }
};

/// Value and first two derivatives of a scalar polynomial.
struct PolyValues {
    double value;
    double d1;
    double d2;
};

/// h(phi) = -2 phi^3 + 3 phi^2 and derivatives.
[[nodiscard]] constexpr PolyValues eval_h_family(double phi) noexcept {
    return {phi * phi * (3.0 - 2.0 * phi), phi * (6.0 - 6.0 * phi), 6.0 - 12.0 * phi};
}

/// g(phi) = phi^2 (1-phi)^2 and derivatives.
[[nodiscard]] constexpr PolyValues eval_g_family(double phi) noexcept {
    const double q = phi * (1.0 - phi);
    return {q * q, 2.0 * q * (1.0 - 2.0 * phi), (12.0 * phi - 12.0) * phi + 2.0};
}

[[nodiscard]] constexpr double reaction_f1(double phi, double c, const CorrosionParameters& p) noexcept {
    const auto h = eval_h_family(phi);
    const auto g = eval_g_family(phi);
    const double s = 1.0 - p.c_L;
    return 2.0 * p.A * p.L * s * (c - h.value * s - p.c_L) * h.d1 - p.omega * p.L * g.d1;
}

[[nodiscard]] constexpr double reaction_f2(double phi, const CorrosionParameters& p) noexcept {
    return (p.c_L - 1.0) * eval_h_family(phi).value;
}

/// dF1/dphi.
[[nodiscard]] constexpr double jacobian_f1_phi(double phi, double c, const CorrosionParameters& p) noexcept {
    const auto h = eval_h_family(phi);
    const auto g = eval_g_family(phi);
    const double s = 1.0 - p.c_L;
    return 2.0 * p.A * p.L * s * ((c - h.value * s - p.c_L) * h.d2 - s * h.d1 * h.d1) -
           p.omega * p.L * g.d2;
}

/// Entrywise F1 on fields of equal shape.
inline Eigen::MatrixXd reaction_f1(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& c,
                                   const CorrosionParameters& p) {
    Eigen::MatrixXd out(phi.rows(), phi.cols());
    const Eigen::Index n = phi.size();
    const double* ph = phi.data();
    const double* cc = c.data();
    double* o = out.data();
    for (Eigen::Index i = 0; i < n; ++i) o[i] = reaction_f1(ph[i], cc[i], p);
    return out;
}

inline Eigen::MatrixXd reaction_f2(const Eigen::MatrixXd& phi, const CorrosionParameters& p) {
    return phi.unaryExpr([&p](double v) { return reaction_f2(v, p); });
}

enum class RelaxationMode { FixedW, PerStepJacobianMax };

struct RelaxationPolicy {
    RelaxationMode mode = RelaxationMode::FixedW;
    double fixed_w = 4.43e8;
    double safety_factor = 1.1;

    void validate() const {
        if (!(fixed_w > 0)) throw std::invalid_argument("RelaxationPolicy: fixed_w must be positive");
        if (!(safety_factor >= 1)) throw std::invalid_argument("RelaxationPolicy: safety_factor must be >= 1");
    }

    /// FixedW(4.43e8) for the tabulated parameters, Jacobian scan otherwise.
    static RelaxationPolicy default_for(const CorrosionParameters& p) {
        RelaxationPolicy r;
        if (!p.is_default()) r.mode = RelaxationMode::PerStepJacobianMax;
        return r;
    }
};

/// Relaxation parameter w. The field arguments are required for the Jacobian scan.
inline double estimate_relaxation_w(const CorrosionParameters& p, const RelaxationPolicy& policy,
                                    const Eigen::MatrixXd* phi = nullptr,
                                    const Eigen::MatrixXd* c = nullptr) {
    policy.validate();
    if (policy.mode == RelaxationMode::FixedW) return policy.fixed_w;
    if (phi == nullptr || c == nullptr)
        throw std::invalid_argument("estimate_relaxation_w: fields required for PerStepJacobianMax");
    if (phi->size() != c->size()) throw std::invalid_argument("estimate_relaxation_w: field size mismatch");
    double m = 0.0;
    for (Eigen::Index i = 0; i < phi->size(); ++i)
        m = std::max(m, std::abs(jacobian_f1_phi(phi->data()[i], c->data()[i], p)));
    return policy.safety_factor * m;
}

/// Interface quantities from which D_phi and omega are usually derived.
struct InterfaceDerivation {
    double alpha_phi;  ///< gradient energy coefficient
    double omega;
    double D_phi;
};

/// Inverts sigma = sqrt(16 omega alpha), l = alpha_star sqrt(2 alpha / omega).
inline InterfaceDerivation derive_interface_parameters(double L, double sigma, double l, double alpha_star) {
    if (!(L > 0 && sigma > 0 && l > 0 && alpha_star > 0))
        throw std::invalid_argument("derive_interface_parameters: inputs must be positive");
    const double alpha = sigma * l / (4.0 * alpha_star * std::sqrt(2.0));
    const double omega = sigma * sigma / (16.0 * alpha);
    return {alpha, omega, L * alpha};
}

} // namespace pitcorr
