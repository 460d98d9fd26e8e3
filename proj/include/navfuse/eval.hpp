#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "navfuse/geodesy.hpp"

namespace navfuse {

/// One evaluation epoch: estimated and true position in a shared local NED
/// frame (anchored at the trajectory's first truth point).
struct AlignedSample {
    double time = 0.0;
    Eigen::Vector3d estimate_ned = Eigen::Vector3d::Zero();
    Eigen::Vector3d truth_ned = Eigen::Vector3d::Zero();
};

/// Aligned estimate/truth series for one filter run.
struct RunResult {
    std::string scenario;
    std::string variant;  // "baseline" | "accel"
    std::uint64_t seed = 0;
    std::vector<AlignedSample> samples;
};

/// Root mean square of the 3D position error norm over all epochs.
inline double prmse(const RunResult& result) {
    if (result.samples.empty()) throw std::invalid_argument("prmse: empty series");
    double acc = 0.0;
    for (const auto& s : result.samples)
        acc += (s.estimate_ned - s.truth_ned).squaredNorm();
    return std::sqrt(acc / static_cast<double>(result.samples.size()));
}

/// Percent reduction of the proposed PRMSE relative to the baseline.
inline double improvement_pct(double baseline, double proposed) {
    if (!(baseline > 0.0)) throw std::invalid_argument("improvement_pct: baseline <= 0");
    return 100.0 * (1.0 - proposed / baseline);
}

struct ComparisonRow {
    std::string trajectory;
    double prmse_baseline = 0.0;
    double prmse_accel = 0.0;
    double improvement = 0.0;
};

inline ComparisonRow make_row(const std::string& trajectory, double base, double accel) {
    return {trajectory, base, accel, improvement_pct(base, accel)};
}

/// Column-wise arithmetic means; the improvement column is the mean of the
/// per-trajectory improvements, not the improvement of the mean PRMSEs.
inline ComparisonRow aggregate(const std::vector<ComparisonRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("aggregate: empty input");
    ComparisonRow avg;
    avg.trajectory = "average";
    for (const auto& r : rows) {
        avg.prmse_baseline += r.prmse_baseline;
        avg.prmse_accel += r.prmse_accel;
        avg.improvement += r.improvement;
    }
    const double n = static_cast<double>(rows.size());
    avg.prmse_baseline /= n;
    avg.prmse_accel /= n;
    avg.improvement /= n;
    return avg;
}

}  // namespace navfuse
