#pragma once

#include <Eigen/Core>

namespace pitcorr {

/// Phase field and concentration on the grid (x-fastest storage, see Grid).
struct FieldPair {
    Eigen::MatrixXd phi;
    Eigen::MatrixXd c;
    double t = 0.0;
    long step_index = 0;

    [[nodiscard]] bool all_finite() const { return phi.allFinite() && c.allFinite(); }
};

enum class SchemeOrder { Euler, TwoSBDF };

inline const char* to_string(SchemeOrder o) { return o == SchemeOrder::Euler ? "euler" : "2sbdf"; }

} // namespace pitcorr
