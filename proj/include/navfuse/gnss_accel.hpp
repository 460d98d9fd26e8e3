#pragma once

#include <deque>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "navfuse/geodesy.hpp"

namespace navfuse {

/// Timestamped geodetic GNSS fix with per-NED-axis standard deviation [m].
struct GnssFix {
    double time = 0.0;
    GeodeticPosition position;
    Eigen::Vector3d sigma = Eigen::Vector3d::Ones();

    void validate() const {
        if (!std::isfinite(time)) throw std::invalid_argument("GnssFix: non-finite time");
        require_valid(position);
        if ((sigma.array() <= 0.0).any())
            throw std::invalid_argument("GnssFix: sigma must be positive");
    }
};

/// Navigation-frame acceleration extracted from a fix window, with the
/// variance propagated from the per-fix position noise.
struct AccelEstimate {
    Eigen::Vector3d accel = Eigen::Vector3d::Zero();  // [m/s^2]
    Eigen::Matrix3d noise_cov = Eigen::Matrix3d::Zero();
    double time = 0.0;  // window reference t0
};

/// Design matrix of the quadratic motion model, rows [1, dt, dt^2/2]
/// with dt measured from the window reference t0.
inline Eigen::MatrixXd design_matrix(const std::vector<double>& times, double t0) {
    const int m = static_cast<int>(times.size());
    if (m < 3) throw std::invalid_argument("design_matrix: need at least 3 samples");
    for (int j = 1; j < m; ++j)
        if (!(times[j] > times[j - 1]))
            throw std::invalid_argument("design_matrix: times not strictly increasing");
    Eigen::MatrixXd a(m, 3);
    for (int j = 0; j < m; ++j) {
        const double dt = times[j] - t0;
        a.row(j) << 1.0, dt, 0.5 * dt * dt;
    }
    return a;
}

/// Row vector B that extracts the acceleration coefficient of the quadratic
/// LS fit: a = B p. Equals row 3 of pinv(A); computed about the mean time for
/// conditioning, which leaves B unchanged (the fitted parabola is the same).
inline Eigen::RowVectorXd quad_fit_row(const std::vector<double>& times) {
    const int m = static_cast<int>(times.size());
    if (m < 3) throw std::invalid_argument("quad_fit_row: need at least 3 samples");
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= m;
    const Eigen::MatrixXd a = design_matrix(times, mean);
    const Eigen::Matrix3d ata = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(ata, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff())
        throw std::runtime_error("quad_fit_row: design matrix rank-deficient");
    const Eigen::Matrix3d ata_inv = ata.llt().solve(Eigen::Matrix3d::Identity());
    return ata_inv.row(2) * a.transpose();
}

/// Per-axis variance of B p under independent per-fix noise: sum_j B_j^2 s_j^2.
inline double accel_noise_var(const Eigen::RowVectorXd& b, const Eigen::VectorXd& sigma_axis) {
    if (b.size() != sigma_axis.size())
        throw std::invalid_argument("accel_noise_var: size mismatch");
    if ((sigma_axis.array() < 0.0).any())
        throw std::invalid_argument("accel_noise_var: negative sigma");
    return (b.array().square() * sigma_axis.array().square()).sum();
}

/// Sliding buffer of the m most recent GNSS fixes. Extraction is allowed only
/// when the buffer is full.
class FixWindow {
public:
    explicit FixWindow(int capacity, double min_span_s = 0.0)
        : capacity_(capacity), min_span_(min_span_s) {
        if (capacity < 3) throw std::invalid_argument("FixWindow: capacity must be >= 3");
        if (min_span_s < 0.0) throw std::invalid_argument("FixWindow: negative span");
    }

    void push_fix(const GnssFix& fix) {
        fix.validate();
        if (!fixes_.empty() && !(fix.time > fixes_.back().time))
            throw std::invalid_argument("FixWindow: non-increasing fix timestamp");
        fixes_.push_back(fix);
        if (static_cast<int>(fixes_.size()) > capacity_) fixes_.pop_front();
    }

    int size() const { return static_cast<int>(fixes_.size()); }
    int capacity() const { return capacity_; }
    bool full() const { return size() == capacity_; }
    const GnssFix& oldest() const { return fixes_.front(); }
    const GnssFix& newest() const { return fixes_.back(); }
    const GeodeticPosition& anchor() const { return fixes_.front().position; }

    bool ready() const {
        return full() && (fixes_.back().time - fixes_.front().time >= min_span_);
    }

    /// LS quadratic fit over the window, mapped to local NED about the anchor.
    /// The third fit parameter per axis is the acceleration estimate.
    AccelEstimate extract_accel() const {
        if (!full()) throw std::logic_error("extract_accel: window not full");
        if (!ready()) throw std::logic_error("extract_accel: window span too short");
        const int m = size();
        std::vector<double> times(m);
        Eigen::MatrixXd p(m, 3);
        Eigen::MatrixXd sig(m, 3);
        for (int j = 0; j < m; ++j) {
            times[j] = fixes_[j].time;
            p.row(j) = llh_to_local_ned(anchor(), fixes_[j].position).transpose();
            sig.row(j) = fixes_[j].sigma.transpose();
        }
        const Eigen::RowVectorXd b = quad_fit_row(times);
        AccelEstimate est;
        est.time = fixes_.front().time;
        est.accel = (b * p).transpose();
        Eigen::Vector3d var;
        for (int axis = 0; axis < 3; ++axis)
            var(axis) = accel_noise_var(b, sig.col(axis));
        est.noise_cov = var.asDiagonal();
        return est;
    }

private:
    int capacity_;
    double min_span_;
    std::deque<GnssFix> fixes_;
};

}  // namespace navfuse
