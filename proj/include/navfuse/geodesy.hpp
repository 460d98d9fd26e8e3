#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace navfuse {

/// WGS84 ellipsoid and normal-gravity constants. Immutable.
struct EarthParams {
    double a = 6378137.0;                  // semi-major axis [m]
    double e2 = 6.69437999014131699e-3;    // first eccentricity squared
    double omega_ie = 7.292115e-5;         // Earth rotation rate [rad/s]
    double gamma_e = 9.7803253359;         // normal gravity at equator [m/s^2]
    double somigliana_k = 1.93185265241e-3;
    double free_air_gradient = 3.086e-6;   // dg/dh [1/s^2], positive down
};

inline constexpr double kDegToRad = M_PI / 180.0;

inline const EarthParams& wgs84() {
    static const EarthParams p{};
    return p;
}

/// Geodetic position: latitude/longitude in radians, ellipsoidal height in meters.
struct GeodeticPosition {
    double latitude = 0.0;
    double longitude = 0.0;
    double height = 0.0;
};

inline bool valid_latitude(double lat) {
    return std::isfinite(lat) && std::abs(lat) <= M_PI / 2 + 1e-15;
}

inline void require_valid(const GeodeticPosition& p) {
    if (!valid_latitude(p.latitude))
        throw std::domain_error("latitude outside [-pi/2, pi/2]");
    if (!std::isfinite(p.longitude) || !std::isfinite(p.height))
        throw std::domain_error("non-finite longitude or height");
}

/// Meridian and normal (transverse) radii of curvature at a latitude.
inline std::pair<double, double> radii_of_curvature(double lat) {
    if (!valid_latitude(lat)) throw std::domain_error("radii_of_curvature: |lat| > pi/2");
    const EarthParams& e = wgs84();
    const double s2 = std::sin(lat) * std::sin(lat);
    const double den = 1.0 - e.e2 * s2;
    const double r_n = e.a / std::sqrt(den);
    const double r_m = e.a * (1.0 - e.e2) / (den * std::sqrt(den));
    return {r_m, r_n};
}

/// Somigliana normal gravity with a linear free-air height correction,
/// returned as a NED vector (down-positive).
inline Eigen::Vector3d gravity_ned(double lat, double h) {
    if (!valid_latitude(lat)) throw std::domain_error("gravity_ned: |lat| > pi/2");
    if (h <= -10000.0) throw std::domain_error("gravity_ned: height below -10 km");
    const EarthParams& e = wgs84();
    const double s2 = std::sin(lat) * std::sin(lat);
    const double g0 = e.gamma_e * (1.0 + e.somigliana_k * s2) / std::sqrt(1.0 - e.e2 * s2);
    return {0.0, 0.0, g0 - e.free_air_gradient * h};
}

/// Cross-product matrix: skew(v) * u == v x u.
inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m <<    0.0, -v.z(),  v.y(),
          v.z(),    0.0, -v.x(),
         -v.y(),  v.x(),    0.0;
    return m;
}

/// Earth rotation rate resolved in NED: [w cos L, 0, -w sin L].
inline Eigen::Vector3d earth_rate_ned(double lat) {
    if (!valid_latitude(lat)) throw std::domain_error("earth_rate_ned: |lat| > pi/2");
    const double w = wgs84().omega_ie;
    return {w * std::cos(lat), 0.0, -w * std::sin(lat)};
}

/// Transport rate of the NED frame over the ellipsoid.
/// Singular near the poles; rejected above 89.9 deg.
inline Eigen::Vector3d transport_rate_ned(const Eigen::Vector3d& v_ned,
                                          const GeodeticPosition& pos) {
    require_valid(pos);
    if (std::abs(pos.latitude) > 89.9 * kDegToRad)
        throw std::domain_error("transport_rate_ned: latitude above 89.9 deg");
    const auto [r_m, r_n] = radii_of_curvature(pos.latitude);
    const double h = pos.height;
    return {v_ned.y() / (r_n + h),
            -v_ned.x() / (r_m + h),
            -v_ned.y() * std::tan(pos.latitude) / (r_n + h)};
}

/// Small-displacement tangent-plane mapping of p relative to anchor, in NED meters.
/// Valid for window-scale displacements; rejects anything past 10 km.
inline Eigen::Vector3d llh_to_local_ned(const GeodeticPosition& anchor,
                                        const GeodeticPosition& p) {
    require_valid(anchor);
    require_valid(p);
    const auto [r_m, r_n] = radii_of_curvature(anchor.latitude);
    Eigen::Vector3d ned;
    ned.x() = (p.latitude - anchor.latitude) * (r_m + anchor.height);
    ned.y() = (p.longitude - anchor.longitude) * (r_n + anchor.height) *
              std::cos(anchor.latitude);
    ned.z() = -(p.height - anchor.height);
    if (ned.norm() > 10000.0)
        throw std::domain_error("llh_to_local_ned: displacement exceeds 10 km");
    return ned;
}

/// Inverse of llh_to_local_ned about the same anchor.
inline GeodeticPosition local_ned_to_llh(const GeodeticPosition& anchor,
                                         const Eigen::Vector3d& ned) {
    require_valid(anchor);
    if (ned.norm() > 10000.0)
        throw std::domain_error("local_ned_to_llh: displacement exceeds 10 km");
    const auto [r_m, r_n] = radii_of_curvature(anchor.latitude);
    GeodeticPosition p;
    p.latitude = anchor.latitude + ned.x() / (r_m + anchor.height);
    p.longitude = anchor.longitude +
                  ned.y() / ((r_n + anchor.height) * std::cos(anchor.latitude));
    p.height = anchor.height - ned.z();
    return p;
}

/// Nearest rotation matrix (polar projection via SVD, det forced to +1).
inline Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d u = svd.matrixU();
        u.col(2) *= -1.0;
        r = u * svd.matrixV().transpose();
    }
    return r;
}

inline bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-9) {
    return (r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < tol &&
           std::abs(r.determinant() - 1.0) < tol;
}

/// Rodrigues exponential map so(3) -> SO(3), stable for small angles.
inline Eigen::Matrix3d exp_so3(const Eigen::Vector3d& phi) {
    const double theta = phi.norm();
    const Eigen::Matrix3d k = skew(phi);
    if (theta < 1e-9) {
        return Eigen::Matrix3d::Identity() + k + 0.5 * k * k;
    }
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    return Eigen::Matrix3d::Identity() + a * k + b * k * k;
}

/// Logarithm map SO(3) -> so(3).
inline Eigen::Vector3d log_so3(const Eigen::Matrix3d& r) {
    Eigen::AngleAxisd aa(r);
    return aa.angle() * aa.axis();
}

/// Heading (yaw) of a body->NED rotation, atan2 of the first column.
inline double yaw_of(const Eigen::Matrix3d& r_bn) {
    return std::atan2(r_bn(1, 0), r_bn(0, 0));
}

}  // namespace navfuse
