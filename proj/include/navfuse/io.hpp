#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "navfuse/gnss_accel.hpp"
#include "navfuse/strapdown.hpp"

namespace navfuse {

struct IoError : std::runtime_error {
    enum class Kind { kMissingFile, kBadHeader, kMalformedRow, kNonMonotonic, kNonFinite };
    Kind kind;
    IoError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

/// Timestamped geodetic ground-truth point.
struct TruthPoint {
    double time = 0.0;
    GeodeticPosition position;
};

/// Normalized dataset: IMU and GNSS streams plus optional truth.
struct DatasetBundle {
    std::vector<ImuSample> imu;
    std::vector<GnssFix> gnss;
    std::optional<std::vector<TruthPoint>> truth;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

inline double parse_field(const std::string& raw, const std::string& file, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(raw, &pos);
        while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
        if (pos != raw.size()) throw std::invalid_argument(raw);
        if (!std::isfinite(v))
            throw IoError(IoError::Kind::kNonFinite,
                          file + ":" + std::to_string(line_no) + ": non-finite value '" + raw + "'");
        return v;
    } catch (const IoError&) {
        throw;
    } catch (const std::exception&) {
        throw IoError(IoError::Kind::kMalformedRow,
                      file + ":" + std::to_string(line_no) + ": cannot parse '" + raw + "'");
    }
}

/// Reads a CSV with the exact expected header; hands each parsed numeric row
/// to sink(line_no, values).
template <typename Sink>
void read_csv(const std::string& path, const std::string& header, int n_cols, Sink&& sink) {
    std::ifstream in(path);
    if (!in) throw IoError(IoError::Kind::kMissingFile, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw IoError(IoError::Kind::kBadHeader, path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw IoError(IoError::Kind::kBadHeader,
                      path + ": expected header '" + header + "', got '" + line + "'");
    int line_no = 1;
    std::vector<double> values(n_cols);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != n_cols)
            throw IoError(IoError::Kind::kMalformedRow,
                          path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(n_cols) + " fields, got " +
                              std::to_string(fields.size()));
        for (int i = 0; i < n_cols; ++i) values[i] = parse_field(fields[i], path, line_no);
        sink(line_no, values);
    }
}

inline void check_monotone(double prev, double t, const std::string& path, int line_no) {
    if (!(t > prev))
        throw IoError(IoError::Kind::kNonMonotonic,
                      path + ":" + std::to_string(line_no) + ": timestamp not increasing");
}

}  // namespace detail

inline const char* kImuHeader = "t,fx,fy,fz,wx,wy,wz";
inline const char* kGnssHeader = "t,lat,lon,h,sn,se,sd";
inline const char* kTruthHeader = "t,lat,lon,h";

inline std::vector<ImuSample> load_imu_csv(const std::string& path) {
    std::vector<ImuSample> out;
    double prev = -std::numeric_limits<double>::infinity();
    detail::read_csv(path, kImuHeader, 7, [&](int line_no, const std::vector<double>& v) {
        detail::check_monotone(prev, v[0], path, line_no);
        prev = v[0];
        ImuSample s;
        s.time = v[0];
        s.specific_force = {v[1], v[2], v[3]};
        s.angular_rate = {v[4], v[5], v[6]};
        out.push_back(s);
    });
    return out;
}

inline std::vector<GnssFix> load_gnss_csv(const std::string& path) {
    std::vector<GnssFix> out;
    double prev = -std::numeric_limits<double>::infinity();
    detail::read_csv(path, kGnssHeader, 7, [&](int line_no, const std::vector<double>& v) {
        detail::check_monotone(prev, v[0], path, line_no);
        prev = v[0];
        GnssFix f;
        f.time = v[0];
        f.position = {v[1], v[2], v[3]};
        f.sigma = {v[4], v[5], v[6]};
        try {
            f.validate();
        } catch (const std::exception& e) {
            throw IoError(IoError::Kind::kMalformedRow,
                          path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(f);
    });
    return out;
}

inline std::vector<TruthPoint> load_truth_csv(const std::string& path) {
    std::vector<TruthPoint> out;
    double prev = -std::numeric_limits<double>::infinity();
    detail::read_csv(path, kTruthHeader, 4, [&](int line_no, const std::vector<double>& v) {
        detail::check_monotone(prev, v[0], path, line_no);
        prev = v[0];
        out.push_back({v[0], {v[1], v[2], v[3]}});
    });
    return out;
}

struct DatasetPaths {
    std::string imu;
    std::string gnss;
    std::string truth;  // optional, empty = absent
};

inline DatasetBundle load_dataset(const DatasetPaths& paths) {
    DatasetBundle b;
    b.imu = load_imu_csv(paths.imu);
    b.gnss = load_gnss_csv(paths.gnss);
    if (!paths.truth.empty()) b.truth = load_truth_csv(paths.truth);
    return b;
}

inline void save_imu_csv(const std::string& path, const std::vector<ImuSample>& imu) {
    std::ofstream out(path);
    if (!out) throw IoError(IoError::Kind::kMissingFile, "cannot write " + path);
    out << kImuHeader << "\n";
    for (const auto& s : imu) {
        out << detail::format_double(s.time);
        for (int i = 0; i < 3; ++i) out << ',' << detail::format_double(s.specific_force(i));
        for (int i = 0; i < 3; ++i) out << ',' << detail::format_double(s.angular_rate(i));
        out << "\n";
    }
}

inline void save_gnss_csv(const std::string& path, const std::vector<GnssFix>& gnss) {
    std::ofstream out(path);
    if (!out) throw IoError(IoError::Kind::kMissingFile, "cannot write " + path);
    out << kGnssHeader << "\n";
    for (const auto& f : gnss) {
        out << detail::format_double(f.time) << ',' << detail::format_double(f.position.latitude)
            << ',' << detail::format_double(f.position.longitude) << ','
            << detail::format_double(f.position.height);
        for (int i = 0; i < 3; ++i) out << ',' << detail::format_double(f.sigma(i));
        out << "\n";
    }
}

inline void save_truth_csv(const std::string& path, const std::vector<TruthPoint>& truth) {
    std::ofstream out(path);
    if (!out) throw IoError(IoError::Kind::kMissingFile, "cannot write " + path);
    out << kTruthHeader << "\n";
    for (const auto& p : truth) {
        out << detail::format_double(p.time) << ',' << detail::format_double(p.position.latitude)
            << ',' << detail::format_double(p.position.longitude) << ','
            << detail::format_double(p.position.height) << "\n";
    }
}

}  // namespace navfuse
