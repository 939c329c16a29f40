#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tonebias/skew.hpp"
#include "tonebias/sweep.hpp"

namespace tonebias {

struct ManifestEntry {
  std::string file;  // relative to the output directory
  std::string hash;
  std::size_t bytes = 0;
};

// Renderers behind emit_report. Reals use six decimals (p-values: six
// significant digits in exponent form) so reruns diff cleanly.
std::string metrics_csv(const SweepResult& sweep);
std::string skew_json(std::span<const SkewReport> skews);
std::string plotdata_csv(const SweepResult& sweep, std::span<const SkewReport> skews);
std::string report_markdown(const SweepResult& sweep, std::span<const SkewReport> skews);

// Writes metrics.csv, skew.json, plotdata.csv and report.md under `out_dir`
// and returns their manifest in that order. Throws IoError.
std::vector<ManifestEntry> emit_report(const SweepResult& sweep, std::span<const SkewReport> skews,
                                       const std::filesystem::path& out_dir);

}  // namespace tonebias
