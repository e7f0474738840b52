#include "otfs/curves.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace otfs {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T parse_field(const std::string& text, int line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("csv line " + std::to_string(line_no) + ": bad field '" + text + "'");
  }
  return v;
}

}  // namespace

void emit_csv(std::vector<CurvePoint> points, std::ostream& out) {
  std::stable_sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) {
    if (a.metric != b.metric) return a.metric < b.metric;
    return a.snr_db < b.snr_db;
  });
  out << kCsvHeader << '\n';
  for (const auto& p : points) {
    out << format_double(p.snr_db) << ',' << p.metric << ',' << format_double(p.value) << ','
        << format_double(p.ci_halfwidth) << ',' << p.trials << '\n';
  }
}

void emit_csv(std::vector<CurvePoint> points, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  emit_csv(std::move(points), out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::vector<CurvePoint> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("csv: missing or wrong header");
  std::vector<CurvePoint> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string item;
    std::istringstream row(line);
    while (std::getline(row, item, ',')) f.push_back(item);
    if (f.size() != 5) throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected 5 fields");
    out.push_back({parse_field<double>(f[0], line_no), f[1], parse_field<double>(f[2], line_no),
                   parse_field<double>(f[3], line_no), parse_field<std::uint64_t>(f[4], line_no)});
  }
  return out;
}

std::vector<CurvePoint> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return parse_csv(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<CurvePoint> select_metric(std::span<const CurvePoint> points, const std::string& metric) {
  std::vector<CurvePoint> out;
  std::copy_if(points.begin(), points.end(), std::back_inserter(out),
               [&](const CurvePoint& p) { return p.metric == metric; });
  std::sort(out.begin(), out.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.snr_db < b.snr_db; });
  return out;
}

double diversity_slope(std::span<const CurvePoint> points, double span_db) {
  std::vector<const CurvePoint*> reliable;
  for (const auto& p : points) {
    const double floor = 10.0 / static_cast<double>(p.trials);
    if (p.value >= floor && p.value <= 0.1 && p.value > 0.0) reliable.push_back(&p);
  }
  if (reliable.empty()) throw EstimatorUndefined("no point inside the reliable outage window");
  const double top = (*std::max_element(reliable.begin(), reliable.end(), [](auto a, auto b) {
                        return a->snr_db < b->snr_db;
                      }))->snr_db;
  std::erase_if(reliable, [&](const CurvePoint* p) { return p->snr_db < top - span_db - 1e-9; });
  if (reliable.size() < 3) {
    throw EstimatorUndefined("need at least 3 reliable points, have " + std::to_string(reliable.size()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(reliable.size());
  for (const auto* p : reliable) {
    const double x = p->snr_db / 10.0;  // log10(rho)
    const double y = std::log10(p->value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw EstimatorUndefined("reliable points share one SNR");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace otfs
