#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "navfuse/geodesy.hpp"
#include "navfuse/strapdown.hpp"

namespace navfuse {

using Matrix15 = Eigen::Matrix<double, 15, 15>;
using Vector15 = Eigen::Matrix<double, 15, 1>;

// State layout: [dp(0) dv(3) phi(6) ba(9) bg(12)].
//
// Conventions used throughout the filter (all mutually consistent):
//   residual        dz  = measurement - prediction
//   position/vel    dp  = truth - estimate (NED meters), dv likewise
//   misalignment    phi : R_true = R_est * exp(-skew(phi))
//   biases          b   = residual bias still present in corrected samples,
//                         i.e. f_true = f_corrected - b_a
// Corrections are therefore *added* at injection, and the accumulated bias
// estimate grows by the estimated residual.
struct ErrorState {
    Vector15 x = Vector15::Zero();

    Eigen::Vector3d dp() const { return x.segment<3>(0); }
    Eigen::Vector3d dv() const { return x.segment<3>(3); }
    Eigen::Vector3d phi() const { return x.segment<3>(6); }
    Eigen::Vector3d ba() const { return x.segment<3>(9); }
    Eigen::Vector3d bg() const { return x.segment<3>(12); }

    void set_dp(const Eigen::Vector3d& v) { x.segment<3>(0) = v; }
    void set_dv(const Eigen::Vector3d& v) { x.segment<3>(3) = v; }
    void set_phi(const Eigen::Vector3d& v) { x.segment<3>(6) = v; }
    void set_ba(const Eigen::Vector3d& v) { x.segment<3>(9) = v; }
    void set_bg(const Eigen::Vector3d& v) { x.segment<3>(12) = v; }
};

/// IMU stochastic model: amplitude spectral densities, per axis.
/// accel_noise [m/s^2/sqrt(Hz)], gyro_noise [rad/s/sqrt(Hz)],
/// accel_bias_rw [m/s^2/sqrt(s)], gyro_bias_rw [rad/s/sqrt(s)].
struct ProcessNoiseParams {
    Eigen::Vector3d accel_noise = Eigen::Vector3d::Zero();
    Eigen::Vector3d gyro_noise = Eigen::Vector3d::Zero();
    Eigen::Vector3d accel_bias_rw = Eigen::Vector3d::Zero();
    Eigen::Vector3d gyro_bias_rw = Eigen::Vector3d::Zero();
};

/// A linear measurement against the 15-element error state.
struct Measurement {
    Eigen::VectorXd residual;  // k
    Eigen::MatrixXd H;         // k x 15
    Eigen::MatrixXd R;         // k x k, SPD

    int size() const { return static_cast<int>(residual.size()); }
    void validate() const {
        if (H.cols() != 15 || H.rows() != residual.size() ||
            R.rows() != R.cols() || R.rows() != residual.size())
            throw std::invalid_argument("Measurement: inconsistent dimensions");
    }
};

inline Matrix15 symmetrized(const Matrix15& p) { return 0.5 * (p + p.transpose()); }

inline double min_eigenvalue(const Matrix15& p) {
    Eigen::SelfAdjointEigenSolver<Matrix15> es(p, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Continuous-time error dynamics. The velocity and attitude rows carry the
/// same specific-force and bias couplings as the acceleration measurement
/// Jacobian; the attitude row sees the gyro bias directly because the
/// misalignment is kept on the body side.
inline Matrix15 build_F(const NavState& state,
                        const Eigen::Vector3d& f_body,
                        const Eigen::Vector3d& omega_body) {
    require_valid(state.position);
    const double lat = state.position.latitude;
    const double h = state.position.height;
    const auto [r_m, r_n] = radii_of_curvature(lat);
    const Eigen::Vector3d v = state.velocity;
    const Eigen::Matrix3d r_bn = state.attitude;
    const EarthParams& ep = wgs84();

    const Eigen::Vector3d w_ie = earth_rate_ned(lat);
    const Eigen::Vector3d w_en = transport_rate_ned(v, state.position);

    // d(omega_en)/d(v_ned)
    Eigen::Matrix3d dwen_dv = Eigen::Matrix3d::Zero();
    dwen_dv(0, 1) = 1.0 / (r_n + h);
    dwen_dv(1, 0) = -1.0 / (r_m + h);
    dwen_dv(2, 1) = -std::tan(lat) / (r_n + h);

    // d(omega_ie + omega_en)/d(dp), dp in NED meters
    Eigen::Matrix3d dwin_dp = Eigen::Matrix3d::Zero();
    const double sec2 = 1.0 / (std::cos(lat) * std::cos(lat));
    dwin_dp(0, 0) = -ep.omega_ie * std::sin(lat) / (r_m + h);
    dwin_dp(2, 0) = (-ep.omega_ie * std::cos(lat) - v.y() * sec2 / (r_n + h)) / (r_m + h);
    dwin_dp(0, 2) = v.y() / ((r_n + h) * (r_n + h));
    dwin_dp(1, 2) = -v.x() / ((r_m + h) * (r_m + h));
    dwin_dp(2, 2) = -v.y() * std::tan(lat) / ((r_n + h) * (r_n + h));

    Eigen::Matrix3d dwie_dp = Eigen::Matrix3d::Zero();
    dwie_dp(0, 0) = -ep.omega_ie * std::sin(lat) / (r_m + h);
    dwie_dp(2, 0) = -ep.omega_ie * std::cos(lat) / (r_m + h);

    Matrix15 f = Matrix15::Zero();
    // position rows
    f.block<3, 3>(0, 0) = -skew(w_en);
    f.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity();
    // velocity rows
    f.block<3, 3>(3, 0) = skew(v) * (dwin_dp + dwie_dp);
    f(5, 2) += ep.free_air_gradient;  // unstable vertical channel
    f.block<3, 3>(3, 3) = -skew(w_en + 2.0 * w_ie) + skew(v) * dwen_dv;
    f.block<3, 3>(3, 6) = r_bn * skew(f_body);
    f.block<3, 3>(3, 9) = -r_bn;
    // attitude rows
    f.block<3, 3>(6, 0) = r_bn.transpose() * dwin_dp;
    f.block<3, 3>(6, 3) = r_bn.transpose() * dwen_dv;
    f.block<3, 3>(6, 6) = -skew(omega_body);
    f.block<3, 3>(6, 12) = Eigen::Matrix3d::Identity();
    // bias rows are zero (random walks)
    return f;
}

/// Noise shaping matrix, block rows [0; R 0 0 0; 0 R 0 0; 0 0 I 0; 0 0 0 I].
inline Eigen::Matrix<double, 15, 12> build_G(const NavState& state) {
    Eigen::Matrix<double, 15, 12> g = Eigen::Matrix<double, 15, 12>::Zero();
    g.block<3, 3>(3, 0) = state.attitude;
    g.block<3, 3>(6, 3) = state.attitude;
    g.block<3, 3>(9, 6) = Eigen::Matrix3d::Identity();
    g.block<3, 3>(12, 9) = Eigen::Matrix3d::Identity();
    return g;
}

/// First-order discretization Phi = I + F dt.
inline Matrix15 discretize(const Matrix15& f, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("discretize: dt <= 0");
    return Matrix15::Identity() + f * dt;
}

/// Q = G diag(densities^2) G^T dt.
inline Matrix15 build_Q(const Eigen::Matrix<double, 15, 12>& g,
                        const ProcessNoiseParams& params, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("build_Q: dt <= 0");
    Eigen::Matrix<double, 12, 1> w;
    w << params.accel_noise.cwiseAbs2(), params.gyro_noise.cwiseAbs2(),
        params.accel_bias_rw.cwiseAbs2(), params.gyro_bias_rw.cwiseAbs2();
    Matrix15 q = g * w.asDiagonal() * g.transpose() * dt;
    return symmetrized(q);
}

/// P- = Phi P Phi^T + Q, symmetrized. Rejects results that lost positive
/// semi-definiteness beyond tolerance (LDLT inertia check).
inline Matrix15 predict_covariance(const Matrix15& p, const Matrix15& phi, const Matrix15& q) {
    Matrix15 out = symmetrized(phi * p * phi.transpose() + q);
    Eigen::LDLT<Matrix15> ldlt(out);
    const double tol = 1e-9 * out.trace();
    if (ldlt.vectorD().minCoeff() < -std::max(tol, 1e-300))
        throw std::runtime_error("predict_covariance: covariance not PSD");
    return out;
}

struct UpdateResult {
    ErrorState dx;
    Matrix15 P;
    Eigen::MatrixXd K;  // 15 x k
};

/// Kalman gain, error-state estimate, and updated covariance.
/// S is solved with a Cholesky factorization, never inverted explicitly.
inline UpdateResult kalman_update(const Matrix15& p_minus, const Measurement& meas) {
    meas.validate();
    const Eigen::MatrixXd hp = meas.H * p_minus;                       // k x 15
    const Eigen::MatrixXd s = hp * meas.H.transpose() + meas.R;        // k x k

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0 || lmax / lmin > 1e12)
        throw std::runtime_error("kalman_update: degenerate measurement geometry");

    UpdateResult out;
    out.K = s.llt().solve(hp).transpose();                             // P H^T S^-1
    out.dx.x = out.K * meas.residual;
    out.P = symmetrized((Matrix15::Identity() - out.K * meas.H) * p_minus);
    return out;
}

/// Navigation estimate plus accumulated IMU bias corrections. The accumulated
/// biases are subtracted from every raw sample before it reaches the filter.
struct FilterState {
    NavState nav;
    Eigen::Vector3d accel_bias = Eigen::Vector3d::Zero();
    Eigen::Vector3d gyro_bias = Eigen::Vector3d::Zero();
};

/// Closed-loop correction: fold the estimated error into the full state and
/// reset. Position corrections pass through the curvature radii; the attitude
/// correction is the exponential of the estimated misalignment.
inline FilterState inject_and_reset(const FilterState& fs, const ErrorState& dx) {
    if (dx.phi().norm() >= 0.5)
        throw std::invalid_argument("inject_and_reset: misalignment outside small-angle range");
    FilterState out = fs;
    const auto [r_m, r_n] = radii_of_curvature(fs.nav.position.latitude);
    const double h = fs.nav.position.height;
    out.nav.position.latitude += dx.dp().x() / (r_m + h);
    out.nav.position.longitude += dx.dp().y() / ((r_n + h) * std::cos(fs.nav.position.latitude));
    out.nav.position.height -= dx.dp().z();
    out.nav.velocity += dx.dv();
    out.nav.attitude = orthonormalized(fs.nav.attitude * exp_so3(-dx.phi()));
    out.accel_bias += dx.ba();
    out.gyro_bias += dx.bg();
    return out;
}

}  // namespace navfuse
