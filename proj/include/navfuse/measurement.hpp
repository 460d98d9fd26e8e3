#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "navfuse/error_ekf.hpp"
#include "navfuse/gnss_accel.hpp"
#include "navfuse/strapdown.hpp"

namespace navfuse {

/// Predicted navigation-frame acceleration: R f + g. Coriolis and transport
/// terms are deliberately omitted from the measurement model (< 0.01 m/s^2 at
/// ground-vehicle speeds).
inline Eigen::Vector3d predict_accel_ned(const NavState& state, const Eigen::Vector3d& f_body) {
    require_valid(state.position);
    return state.attitude * f_body +
           gravity_ned(state.position.latitude, state.position.height);
}

/// Acceleration update: residual against the GNSS-derived acceleration and
/// the Jacobian [0 0 R[f x] -R 0]. f_body must already be bias-corrected.
inline Measurement accel_residual(const NavState& state, const Eigen::Vector3d& f_body,
                                  const AccelEstimate& est) {
    Measurement m;
    m.residual = est.accel - predict_accel_ned(state, f_body);
    m.H = Eigen::MatrixXd::Zero(3, 15);
    m.H.block<3, 3>(0, 6) = state.attitude * skew(f_body);
    m.H.block<3, 3>(0, 9) = -state.attitude;
    m.R = est.noise_cov;
    return m;
}

/// Position update: GNSS fix minus the estimate, in NED meters about the
/// estimate, with H = [I 0 0 0 0] and R = diag(sigma^2).
inline Measurement position_residual(const NavState& state, const GnssFix& fix) {
    fix.validate();
    Measurement m;
    m.residual = llh_to_local_ned(state.position, fix.position);
    m.H = Eigen::MatrixXd::Zero(3, 15);
    m.H.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();
    m.R = fix.sigma.cwiseAbs2().asDiagonal();
    return m;
}

/// Vertical stack of simultaneous measurements; the joint R is block-diagonal
/// (cross-correlation between updates is neglected).
inline Measurement stack(const std::vector<Measurement>& list) {
    if (list.empty()) throw std::invalid_argument("stack: empty measurement list");
    int k = 0;
    for (const auto& m : list) {
        m.validate();
        k += m.size();
    }
    Measurement out;
    out.residual = Eigen::VectorXd::Zero(k);
    out.H = Eigen::MatrixXd::Zero(k, 15);
    out.R = Eigen::MatrixXd::Zero(k, k);
    int row = 0;
    for (const auto& m : list) {
        const int n = m.size();
        out.residual.segment(row, n) = m.residual;
        out.H.middleRows(row, n) = m.H;
        out.R.block(row, row, n, n) = m.R;
        row += n;
    }
    return out;
}

}  // namespace navfuse
