#pragma once

#include "apk/autocorr.hpp"
#include "apk/diffraction.hpp"
#include "apk/generators.hpp"
#include "apk/pseudometrics.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace apk {

using json = nlohmann::ordered_json;

/// Fixed "%.17g" rendering; identical bits give identical text.
std::string format_real(double x);

// Point-set CSV: "# dim=", "# r=", "# window=" header lines, then one point per row.
void write_pointset_csv(std::ostream& os, const PointSet& S);
std::string pointset_csv(const PointSet& S);
/// Parses and validates (sorting, spacing); throws ParseError or the PointSet errors.
PointSet read_pointset_csv(std::istream& is);
PointSet read_pointset_file(const std::filesystem::path& path);

// Measure CSV: "# dim=", "# bin_tol=" header, rows of coordinates then weight.
void write_measure_csv(std::ostream& os, const WeightedAtomMeasure& mu);
WeightedAtomMeasure read_measure_csv(std::istream& is);

// Periodogram CSV: "# R=<R>, norm=<tag>" header, rows of k coordinates then value.
void write_periodogram_csv(std::ostream& os, const Periodogram& pg);

/// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

json point_json(const Point& p);
Point point_from_json(const json& j);
std::vector<Point> point_list_from_json(const json& j);
json point_list_json(std::span<const Point> pts);
/// Infinite or NaN values become null.
json real_json(double x);

json to_json(const DensityEstimate& d);
json to_json(const PseudoMetricReport& r);
json to_json(const CriterionReport& r);
json to_json(const BraggPeak& p);
json to_json(const RegionSpec& A);
json to_json(const PalmIntensityEstimate& e);
json to_json(const AcPalmReport& r);
json to_json(const EventAlmostPeriodReport& r);

/// {"ball": {"center": [...], "radius": r}} or {"box": {"lo": [...], "hi": [...]}}
RegionSpec region_from_json(const json& j);

/// Throws ParseError naming the first key of j not in `allowed`.
void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where);

/// Generator documents (schemas in README.md).
CutProjectConfig cut_project_from_json(const json& j);
ProcessSampler sampler_from_json(const json& j);
json to_json(const CutProjectConfig& cfg);
json to_json(const ProcessSampler& p);

} // namespace apk
