#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "otfs/curves.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Diversity order estimate from a simulate CSV"};
  std::string in_path, metric;
  double span_db = 10.0;
  app.add_option("--in", in_path, "CSV written by simulate")->required()->check(CLI::ExistingFile);
  app.add_option("--metric", metric, "metric column to fit, e.g. u0_outage")->required();
  app.add_option("--span-db", span_db, "fit window below the highest reliable SNR");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto points = otfs::select_metric(otfs::read_csv(in_path), metric);
    if (points.empty()) {
      std::cerr << "error: metric '" << metric << "' not found in " << in_path << '\n';
      return 2;
    }
    std::printf("%s slope %.6f\n", metric.c_str(), otfs::diversity_slope(points, span_db));
  } catch (const otfs::EstimatorUndefined& e) {
    std::cerr << "slope undefined: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
