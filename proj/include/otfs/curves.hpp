#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace otfs {

struct CurvePoint {
  double snr_db;
  std::string metric;
  double value;
  double ci_halfwidth;  ///< 95% normal-approximation halfwidth
  std::uint64_t trials;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Raised when too few points fall inside the slope estimator's validity window.
class EstimatorUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader = "snr_db,metric,value,ci_halfwidth,trials";

/// Header plus one row per point, sorted by (metric, snr_db); doubles round-trip exactly.
void emit_csv(std::vector<CurvePoint> points, std::ostream& out);
void emit_csv(std::vector<CurvePoint> points, const std::filesystem::path& path);

std::vector<CurvePoint> parse_csv(std::istream& in);
std::vector<CurvePoint> read_csv(const std::filesystem::path& path);

/// Points of one metric in increasing SNR order.
std::vector<CurvePoint> select_metric(std::span<const CurvePoint> points, const std::string& metric);

/// Least-squares slope of log10(value) against log10(rho) over the reliable points: value in
/// [10 / trials, 0.1], restricted to the last `span_db` dB below the highest reliable SNR.
/// Needs at least three such points.
double diversity_slope(std::span<const CurvePoint> points, double span_db = 10.0);

}  // namespace otfs
