#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "navfuse/geodesy.hpp"

namespace navfuse {

/// Full navigation solution: geodetic position, NED velocity, body->NED attitude.
struct NavState {
    GeodeticPosition position;
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // NED [m/s]
    Eigen::Matrix3d attitude = Eigen::Matrix3d::Identity();  // body -> NED
    double time = 0.0;  // [s]
};

/// Timestamped specific force and angular rate in the body frame.
struct ImuSample {
    double time = 0.0;
    Eigen::Vector3d specific_force = Eigen::Vector3d::Zero();  // [m/s^2]
    Eigen::Vector3d angular_rate = Eigen::Vector3d::Zero();    // [rad/s]
};

/// Instantaneous rates of the mechanization, frozen at one evaluation point.
/// Splitting evaluation from application keeps the step exactly reversible
/// under a frozen-rate -dt step.
struct StrapdownRates {
    Eigen::Vector3d specific_force;     // bias-corrected body specific force
    Eigen::Vector3d omega_body;         // gyro rate (body w.r.t. inertial)
    Eigen::Vector3d omega_nav;          // earth + transport rate in NED
    Eigen::Vector3d accel_rest;         // g^n - (Omega_en + 2 Omega_ie) v
    Eigen::Matrix3d llh_per_ned;        // diag: NED velocity -> geodetic rates
};

/// Exact exponential-map attitude increment: body-rate term applied on the
/// body side, navigation-frame correction on the navigation side.
inline Eigen::Matrix3d integrate_attitude(const Eigen::Matrix3d& r_bn,
                                          const Eigen::Vector3d& omega_body,
                                          const Eigen::Vector3d& omega_nav_correction,
                                          double dt) {
    if (dt <= 0.0) throw std::invalid_argument("integrate_attitude: dt <= 0");
    return orthonormalized(exp_so3(-omega_nav_correction * dt) * r_bn *
                           exp_so3(omega_body * dt));
}

inline StrapdownRates derive_rates(const NavState& state, const ImuSample& imu) {
    require_valid(state.position);
    StrapdownRates r;
    r.specific_force = imu.specific_force;
    r.omega_body = imu.angular_rate;
    const Eigen::Vector3d w_ie = earth_rate_ned(state.position.latitude);
    const Eigen::Vector3d w_en = transport_rate_ned(state.velocity, state.position);
    r.omega_nav = w_ie + w_en;
    r.accel_rest = gravity_ned(state.position.latitude, state.position.height) -
                   (skew(w_en) + 2.0 * skew(w_ie)) * state.velocity;
    const auto [r_m, r_n] = radii_of_curvature(state.position.latitude);
    const double h = state.position.height;
    r.llh_per_ned = Eigen::Vector3d(1.0 / (r_m + h),
                                    1.0 / ((r_n + h) * std::cos(state.position.latitude)),
                                    -1.0)
                        .asDiagonal();
    return r;
}

/// One frozen-rate step. Velocity uses the half-increment attitude so a
/// constant body force maps through the mid-interval rotation; position
/// integrates the velocity midpoint. Both choices keep
/// apply_rates(apply_rates(s, r, dt), r, -dt) == s to roundoff.
inline NavState apply_rates(const NavState& state, const StrapdownRates& rates, double dt) {
    NavState out = state;

    const Eigen::Matrix3d r_half = exp_so3(-rates.omega_nav * (0.5 * dt)) *
                                   state.attitude * exp_so3(rates.omega_body * (0.5 * dt));
    const Eigen::Vector3d v_dot = r_half * rates.specific_force + rates.accel_rest;
    out.velocity = state.velocity + v_dot * dt;

    const Eigen::Vector3d v_mid = state.velocity + 0.5 * v_dot * dt;
    const Eigen::Vector3d llh_rate = rates.llh_per_ned * v_mid;
    out.position.latitude = state.position.latitude + llh_rate.x() * dt;
    out.position.longitude = state.position.longitude + llh_rate.y() * dt;
    out.position.height = state.position.height + llh_rate.z() * dt;

    out.attitude = orthonormalized(exp_so3(-rates.omega_nav * dt) * state.attitude *
                                   exp_so3(rates.omega_body * dt));
    out.time = state.time + dt;
    return out;
}

/// Advance the navigation state by one IMU interval. The sample is treated as
/// constant over dt; bias correction is the caller's responsibility.
inline NavState propagate(const NavState& state, const ImuSample& imu, double dt) {
    if (dt <= 0.0 || dt > 0.1) throw std::invalid_argument("propagate: dt outside (0, 0.1]");
    if (!is_rotation(state.attitude))
        throw std::invalid_argument("propagate: attitude not orthonormal");
    return apply_rates(state, derive_rates(state, imu), dt);
}

}  // namespace navfuse
