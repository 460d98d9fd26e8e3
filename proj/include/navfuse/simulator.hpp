#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "navfuse/geodesy.hpp"
#include "navfuse/gnss_accel.hpp"
#include "navfuse/strapdown.hpp"

namespace navfuse {

enum class ProfileKind { kStraight, kFigureEight, kRacetrack, kStopAndGo };

/// Analytic ground-truth trajectory description. All profiles are flat by
/// default; stop-and-go can add height change via vertical_slope.
struct TrajectoryProfile {
    ProfileKind kind = ProfileKind::kFigureEight;
    double speed = 5.0;        // peak speed [m/s]
    double duration = 300.0;   // [s]
    GeodeticPosition origin{45.0 * kDegToRad, 0.0, 100.0};
    double scale = 60.0;       // figure-eight half-width / racetrack turn radius [m]
    double straight_len = 80.0;  // racetrack straight length [m]
    double stop_s = 5.0;       // stop-and-go phase lengths
    double ramp_s = 4.0;
    double cruise_s = 10.0;
    double vertical_slope = 0.0;  // stop-and-go height gain per meter traveled

    void validate() const {
        if (duration <= 0.0) throw std::invalid_argument("profile: duration <= 0");
        if (speed < 0.0) throw std::invalid_argument("profile: negative speed");
        require_valid(origin);
    }
};

/// Local-NED kinematics of a profile at one instant.
struct LocalKinematics {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
};

namespace detail {

inline LocalKinematics eval_straight(const TrajectoryProfile& pr, double t) {
    LocalKinematics k;
    k.p = {pr.speed * t, 0.0, 0.0};
    k.v = {pr.speed, 0.0, 0.0};
    return k;
}

/// Lissajous figure-eight: north = A sin(wt), east = (A/2) sin(2wt).
/// Peak speed (at t = 0) equals the profile speed.
inline LocalKinematics eval_figure_eight(const TrajectoryProfile& pr, double t) {
    const double a = pr.scale;
    const double w = pr.speed / (a * std::sqrt(2.0));
    LocalKinematics k;
    k.p = {a * std::sin(w * t), 0.5 * a * std::sin(2.0 * w * t), 0.0};
    k.v = {a * w * std::cos(w * t), a * w * std::cos(2.0 * w * t), 0.0};
    k.a = {-a * w * w * std::sin(w * t), -2.0 * a * w * w * std::sin(2.0 * w * t), 0.0};
    return k;
}

/// Two straights joined by semicircular turns, constant speed.
inline LocalKinematics eval_racetrack(const TrajectoryProfile& pr, double t) {
    const double r = pr.scale;
    const double ls = pr.straight_len;
    const double v = pr.speed;
    const double perimeter = 2.0 * (ls + M_PI * r);
    double s = std::fmod(v * t, perimeter);
    if (s < 0.0) s += perimeter;
    const double v2r = v * v / r;
    LocalKinematics k;
    if (s < ls) {  // north-bound straight
        k.p = {s, 0.0, 0.0};
        k.v = {v, 0.0, 0.0};
    } else if (s < ls + M_PI * r) {  // right turn
        const double th = (s - ls) / r;
        k.p = {ls + r * std::sin(th), r - r * std::cos(th), 0.0};
        k.v = {v * std::cos(th), v * std::sin(th), 0.0};
        k.a = {-v2r * std::sin(th), v2r * std::cos(th), 0.0};
    } else if (s < 2.0 * ls + M_PI * r) {  // south-bound straight
        const double u = s - ls - M_PI * r;
        k.p = {ls - u, 2.0 * r, 0.0};
        k.v = {-v, 0.0, 0.0};
    } else {  // return turn
        const double th = (s - 2.0 * ls - M_PI * r) / r;
        k.p = {-r * std::sin(th), r + r * std::cos(th), 0.0};
        k.v = {-v * std::cos(th), -v * std::sin(th), 0.0};
        k.a = {v2r * std::sin(th), -v2r * std::cos(th), 0.0};
    }
    return k;
}

/// Straight-line stop/ramp/cruise cycle with cubic-smoothstep speed ramps.
inline LocalKinematics eval_stop_and_go(const TrajectoryProfile& pr, double t) {
    const double ts = pr.stop_s, tr = pr.ramp_s, tc = pr.cruise_s;
    const double cycle = ts + tr + tc + tr;
    const double dist_cycle = pr.speed * (0.5 * tr + tc + 0.5 * tr);
    const double n_cycles = std::floor(t / cycle);
    double tau = t - n_cycles * cycle;
    double dist = n_cycles * dist_cycle;
    double vel = 0.0, acc = 0.0;
    if (tau < ts) {
        // stopped
    } else if (tau < ts + tr) {
        const double u = (tau - ts) / tr;
        dist += pr.speed * tr * (u * u * u - 0.5 * u * u * u * u);
        vel = pr.speed * (3.0 * u * u - 2.0 * u * u * u);
        acc = pr.speed * (6.0 * u - 6.0 * u * u) / tr;
    } else if (tau < ts + tr + tc) {
        dist += pr.speed * (0.5 * tr + (tau - ts - tr));
        vel = pr.speed;
    } else {
        const double u = (tau - ts - tr - tc) / tr;
        dist += pr.speed * (0.5 * tr + tc) +
                pr.speed * tr * (u - u * u * u + 0.5 * u * u * u * u);
        vel = pr.speed * (1.0 - 3.0 * u * u + 2.0 * u * u * u);
        acc = -pr.speed * (6.0 * u - 6.0 * u * u) / tr;
    }
    LocalKinematics k;
    k.p = {dist, 0.0, -pr.vertical_slope * dist};
    k.v = {vel, 0.0, -pr.vertical_slope * vel};
    k.a = {acc, 0.0, -pr.vertical_slope * acc};
    return k;
}

}  // namespace detail

inline LocalKinematics eval_profile(const TrajectoryProfile& pr, double t) {
    switch (pr.kind) {
        case ProfileKind::kStraight: return detail::eval_straight(pr, t);
        case ProfileKind::kFigureEight: return detail::eval_figure_eight(pr, t);
        case ProfileKind::kRacetrack: return detail::eval_racetrack(pr, t);
        case ProfileKind::kStopAndGo: return detail::eval_stop_and_go(pr, t);
    }
    throw std::logic_error("eval_profile: unknown kind");
}

/// One ground-truth epoch: full navigation state plus the analytic
/// navigation-frame acceleration.
struct TruthSample {
    double time = 0.0;
    NavState state;
    Eigen::Vector3d accel_ned = Eigen::Vector3d::Zero();
};

inline Eigen::Matrix3d yaw_rotation(double yaw) {
    Eigen::Matrix3d r;
    r << std::cos(yaw), -std::sin(yaw), 0.0,
         std::sin(yaw),  std::cos(yaw), 0.0,
         0.0, 0.0, 1.0;
    return r;
}

/// Sample a profile at the given rate. Attitude is level with the body x axis
/// along the ground track; heading holds through stops.
inline std::vector<TruthSample> generate_truth(const TrajectoryProfile& profile, double rate) {
    profile.validate();
    if (rate <= 0.0) throw std::invalid_argument("generate_truth: rate <= 0");
    const int n = static_cast<int>(std::llround(profile.duration * rate));
    std::vector<TruthSample> out;
    out.reserve(n + 1);
    double yaw_hold = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / rate;
        const LocalKinematics kin = eval_profile(profile, t);
        if (kin.v.head<2>().norm() > 1e-9) yaw_hold = std::atan2(kin.v.y(), kin.v.x());
        TruthSample s;
        s.time = t;
        s.state.time = t;
        s.state.position = local_ned_to_llh(profile.origin, kin.p);
        s.state.velocity = kin.v;
        s.state.attitude = yaw_rotation(yaw_hold);
        s.accel_ned = kin.a;
        out.push_back(s);
    }
    return out;
}

/// IMU corruption model: constant biases plus white noise.
struct ImuErrorModel {
    Eigen::Vector3d accel_bias = Eigen::Vector3d::Zero();   // [m/s^2]
    Eigen::Vector3d gyro_bias = Eigen::Vector3d::Zero();    // [rad/s]
    Eigen::Vector3d accel_noise_density = Eigen::Vector3d::Zero();  // [m/s^2/sqrt(Hz)]
    Eigen::Vector3d gyro_noise_density = Eigen::Vector3d::Zero();   // [rad/s/sqrt(Hz)]
    double rate = 100.0;  // [Hz]
    std::uint64_t seed = 0;
};

/// GNSS corruption model: independent per-axis NED position noise.
struct GnssErrorModel {
    Eigen::Vector3d sigma = Eigen::Vector3d::Constant(1.5);  // [m]
    double rate = 1.0;  // [Hz]
    std::uint64_t seed = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic sub-stream seed: one master seed fans out by tag.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(splitmix64(seed) ^ splitmix64(tag));
}

/// Invert the mechanization over each truth interval: the gyro sample is the
/// exact body rotation increment implied by the truth attitudes and the
/// navigation-frame rate, the accelerometer sample reproduces the truth
/// velocity change through the same half-increment rotation the integrator
/// applies. Errors are added afterwards.
inline std::vector<ImuSample> synthesize_imu(const std::vector<TruthSample>& truth,
                                             const ImuErrorModel& model) {
    if (truth.size() < 2) throw std::invalid_argument("synthesize_imu: need >= 2 truth samples");
    std::mt19937_64 rng(substream_seed(model.seed, 0x494D55ULL));
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<ImuSample> out;
    out.reserve(truth.size() - 1);
    for (std::size_t k = 1; k < truth.size(); ++k) {
        const NavState& s0 = truth[k - 1].state;
        const NavState& s1 = truth[k].state;
        const double dt = truth[k].time - truth[k - 1].time;
        if (dt <= 0.0) throw std::invalid_argument("synthesize_imu: non-increasing truth times");

        const Eigen::Vector3d w_ie = earth_rate_ned(s0.position.latitude);
        const Eigen::Vector3d w_en = transport_rate_ned(s0.velocity, s0.position);
        const Eigen::Vector3d w_nav = w_ie + w_en;
        const Eigen::Vector3d accel_rest =
            gravity_ned(s0.position.latitude, s0.position.height) -
            (skew(w_en) + 2.0 * skew(w_ie)) * s0.velocity;

        ImuSample s;
        s.time = truth[k].time;
        s.angular_rate =
            log_so3(s0.attitude.transpose() * exp_so3(w_nav * dt) * s1.attitude) / dt;
        const Eigen::Matrix3d r_half = exp_so3(-w_nav * (0.5 * dt)) * s0.attitude *
                                       exp_so3(s.angular_rate * (0.5 * dt));
        s.specific_force =
            r_half.transpose() * ((s1.velocity - s0.velocity) / dt - accel_rest);

        const double root_dt = std::sqrt(dt);
        for (int i = 0; i < 3; ++i)
            s.specific_force(i) += model.accel_bias(i) +
                                   model.accel_noise_density(i) / root_dt * gauss(rng);
        for (int i = 0; i < 3; ++i)
            s.angular_rate(i) += model.gyro_bias(i) +
                                 model.gyro_noise_density(i) / root_dt * gauss(rng);
        out.push_back(s);
    }
    return out;
}

/// GNSS fixes on the truth trajectory with independent Gaussian NED errors.
inline std::vector<GnssFix> synthesize_gnss(const std::vector<TruthSample>& truth,
                                            const GnssErrorModel& model) {
    if (truth.empty()) throw std::invalid_argument("synthesize_gnss: empty truth");
    if (model.rate <= 0.0) throw std::invalid_argument("synthesize_gnss: rate <= 0");
    if ((model.sigma.array() <= 0.0).any())
        throw std::invalid_argument("synthesize_gnss: sigma must be positive");
    std::mt19937_64 rng(substream_seed(model.seed, 0x474E5353ULL));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double t0 = truth.front().time;
    const double t_end = truth.back().time;
    const double step = 1.0 / model.rate;

    std::vector<GnssFix> out;
    std::size_t cursor = 0;
    for (int k = 1;; ++k) {
        const double t = t0 + k * step;
        if (t > t_end + 1e-9) break;
        while (cursor + 1 < truth.size() && truth[cursor + 1].time < t - 1e-9) ++cursor;
        // interpolate position between bracketing truth samples
        const TruthSample& a = truth[cursor];
        const TruthSample& b = truth[std::min(cursor + 1, truth.size() - 1)];
        GeodeticPosition p_true;
        if (b.time > a.time + 1e-12) {
            const double alpha = std::clamp((t - a.time) / (b.time - a.time), 0.0, 1.0);
            const Eigen::Vector3d ned = alpha * llh_to_local_ned(a.state.position, b.state.position);
            p_true = local_ned_to_llh(a.state.position, ned);
        } else {
            p_true = a.state.position;
        }
        Eigen::Vector3d noise;
        for (int i = 0; i < 3; ++i) noise(i) = model.sigma(i) * gauss(rng);
        GnssFix fix;
        fix.time = t;
        fix.position = local_ned_to_llh(p_true, noise);
        fix.sigma = model.sigma;
        out.push_back(fix);
    }
    return out;
}

}  // namespace navfuse
