#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsvqa/error.hpp"
#include "tsvqa/metric.hpp"
#include "tsvqa/video_io.hpp"

namespace tsvqa {

struct ManifestEntry {
  std::filesystem::path reference;
  std::filesystem::path distorted;
  VideoDescriptor descriptor;  // frame_count stays 0 until the files are probed
  double dmos = 0.0;
  std::string tag;
  std::optional<FrameRange> frame_range;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

// Comma-separated manifest with a mandatory header row:
//   ref_path,dist_path,width,height,dmos,tag[,frame_start,frame_end]
// Relative paths are resolved against base_dir. frame_end is inclusive.
DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);

// Sample Pearson correlation. kLengthMismatch for unequal or too-short input,
// kConstantInput when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the average of the ranks they span.
std::vector<double> fractional_ranks(std::span<const double> values);

// Pearson correlation of fractional ranks.
double spearman(std::span<const double> x, std::span<const double> y);

// 10 log10(255^2 / MSE) over every luma sample. Identical inputs give +inf.
double psnr(std::span<const LumaFrame> reference, std::span<const LumaFrame> distorted);
double psnr_files(const std::filesystem::path& reference, const std::filesystem::path& distorted,
                  int width, int height, std::optional<FrameRange> range = std::nullopt);

struct CorrelationPair {
  std::optional<double> pcc;
  std::optional<double> scc;
  std::size_t n = 0;
};

struct EntryOutcome {
  std::size_t index = 0;
  std::string tag;
  double dmos = 0.0;
  std::optional<double> score;
  std::optional<double> psnr;
  std::optional<ErrorCode> error_code;
  std::string error;
};

// Correlations are raw (score, DMOS) values. Higher DMOS means worse quality,
// so a metric that agrees with viewers correlates negatively.
struct CorrelationReport {
  CorrelationPair overall;
  std::map<std::string, CorrelationPair> per_tag;
  CorrelationPair psnr_baseline;
  std::vector<EntryOutcome> entries;
  std::size_t failed = 0;
};

// Builds a report from per-entry results. Entries without a score are
// excluded from every statistic; groups where a correlation is undefined get
// an empty optional.
CorrelationReport assemble_report(std::vector<EntryOutcome> outcomes);

// Scores every entry (honoring its frame range) and correlates with DMOS.
// Entry failures are recorded in the report; an empty manifest throws
// kEmptyManifest.
CorrelationReport evaluate_dataset(const DatasetManifest& manifest, const MetricConfig& config,
                                   int threads = 1);

}  // namespace tsvqa
