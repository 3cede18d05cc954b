#pragma once

#include <filesystem>
#include <string>

#include "scalemix/sim_harness.hpp"

namespace scalemix {

/// Header `estimator,n,replications,mean_abs_error,std_abs_error,failures`,
/// one row per (estimator, n), floats in shortest round-trip form.
std::string report_csv(const ExperimentReport& report);
void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path);

/// Log-log chart of mean absolute error against n, one polyline per estimator
/// with +-1 standard deviation whiskers. Nonpositive values are left out.
std::string error_plot_svg(const ExperimentReport& report);
void render_error_plot_svg(const ExperimentReport& report, const std::filesystem::path& path);

/// Shortest decimal that reads back to the same double ("nan", "inf" for
/// non-finite values).
std::string format_double(double v);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace scalemix
