#include "tsvqa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace tsvqa {

namespace {

constexpr const char* kRequiredColumns[] = {"ref_path", "dist_path", "width",
                                            "height",   "dmos",      "tag"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void manifest_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kManifestFormat, "manifest line " + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no, const char* column) {
  T value{};
  std::istringstream ss(text);
  ss >> value;
  if (text.empty() || ss.fail() || !ss.eof()) {
    manifest_error(line_no, std::string("bad ") + column + " '" + text + "'");
  }
  return value;
}

std::filesystem::path resolve(const std::string& text, const std::filesystem::path& base) {
  std::filesystem::path p(text);
  return p.is_absolute() || base.empty() ? p : base / p;
}

CorrelationPair correlate(std::span<const double> x, std::span<const double> y) {
  CorrelationPair pair;
  pair.n = x.size();
  try {
    pair.pcc = pearson(x, y);
    pair.scc = spearman(x, y);
  } catch (const Error&) {
    // Too few samples or a constant side; the group has no defined value.
  }
  return pair;
}

}  // namespace

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) header = split_fields(line);
  }
  if (header.empty()) throw Error(ErrorCode::kEmptyManifest, "manifest has no header row");
  for (std::size_t i = 0; i < std::size(kRequiredColumns); ++i) {
    if (i >= header.size() || header[i] != kRequiredColumns[i]) {
      manifest_error(line_no, std::string("expected column '") + kRequiredColumns[i] + "'");
    }
  }
  const bool has_range = header.size() >= 8;
  if (header.size() == 7 || header.size() > 8 ||
      (has_range && (header[6] != "frame_start" || header[7] != "frame_end"))) {
    manifest_error(line_no, "optional columns must be exactly frame_start,frame_end");
  }

  DatasetManifest manifest;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 6 && !(has_range && fields.size() == 8)) {
      manifest_error(line_no, "expected " + std::string(has_range ? "6 or 8" : "6") +
                                  " fields, got " + std::to_string(fields.size()));
    }
    ManifestEntry entry;
    entry.reference = resolve(fields[0], base_dir);
    entry.distorted = resolve(fields[1], base_dir);
    if (fields[0].empty() || fields[1].empty()) manifest_error(line_no, "empty path");
    if (entry.reference == entry.distorted) {
      manifest_error(line_no, "reference and distorted paths are the same");
    }
    entry.descriptor.width = parse_number<int>(fields[2], line_no, "width");
    entry.descriptor.height = parse_number<int>(fields[3], line_no, "height");
    entry.dmos = parse_number<double>(fields[4], line_no, "dmos");
    if (!std::isfinite(entry.dmos)) manifest_error(line_no, "dmos must be finite");
    entry.tag = fields[5];
    if (fields.size() == 8 && !(fields[6].empty() && fields[7].empty())) {
      const auto first = parse_number<long long>(fields[6], line_no, "frame_start");
      const auto last = parse_number<long long>(fields[7], line_no, "frame_end");
      if (first < 0 || last < first) manifest_error(line_no, "bad frame range");
      entry.frame_range = FrameRange{static_cast<std::size_t>(first),
                                     static_cast<std::size_t>(last)};
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "pearson inputs have lengths " +
                                                std::to_string(x.size()) + " and " +
                                                std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(ErrorCode::kLengthMismatch, "pearson needs at least 2 samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kConstantInput, "pearson input has zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) hold ranks i+1..j+1.
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "spearman inputs differ in length");
  }
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

double psnr(std::span<const LumaFrame> reference, std::span<const LumaFrame> distorted) {
  if (reference.size() != distorted.size()) {
    throw Error(ErrorCode::kFrameCountMismatch,
                "reference has " + std::to_string(reference.size()) +
                    " frames, distorted has " + std::to_string(distorted.size()));
  }
  if (reference.empty()) throw Error(ErrorCode::kEmptySelection, "no frames for PSNR");
  double sse = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < reference.size(); ++f) {
    if (!reference[f].same_shape(distorted[f])) {
      throw Error(ErrorCode::kDimensionMismatch, "frame " + std::to_string(f) + " sizes differ");
    }
    const auto a = reference[f].values();
    const auto b = distorted[f].values();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
      sse += d * d;
    }
    count += a.size();
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / (sse / static_cast<double>(count)));
}

double psnr_files(const std::filesystem::path& reference, const std::filesystem::path& distorted,
                  int width, int height, std::optional<FrameRange> range) {
  Yuv420Reader ref(reference, width, height);
  Yuv420Reader dist(distorted, width, height);
  const std::size_t total = ref.descriptor().frame_count;
  if (total != dist.descriptor().frame_count) {
    throw Error(ErrorCode::kFrameCountMismatch, "videos differ in frame count");
  }
  std::size_t first = 0;
  std::size_t last = total == 0 ? 0 : total - 1;
  if (range) {
    if (range->first > range->last || range->last >= total) {
      throw Error(ErrorCode::kInvalidArgument, "frame range outside video");
    }
    first = range->first;
    last = range->last;
  }
  if (total == 0) throw Error(ErrorCode::kEmptySelection, "no frames for PSNR");

  constexpr std::size_t kChunk = 8;
  double sse = 0.0;
  std::size_t count = 0;
  for (std::size_t f = first; f <= last; f += kChunk) {
    const std::size_t n = std::min(kChunk, last + 1 - f);
    const auto a = ref.read(f, n);
    const auto b = dist.read(f, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto va = a[i].values();
      const auto vb = b[i].values();
      for (std::size_t j = 0; j < va.size(); ++j) {
        const double d = static_cast<double>(va[j]) - static_cast<double>(vb[j]);
        sse += d * d;
      }
      count += va.size();
    }
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / (sse / static_cast<double>(count)));
}

CorrelationReport assemble_report(std::vector<EntryOutcome> outcomes) {
  CorrelationReport report;
  std::vector<double> scores;
  std::vector<double> dmos;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  std::vector<double> psnr_values;
  std::vector<double> psnr_dmos;
  for (const auto& o : outcomes) {
    if (!o.score) {
      ++report.failed;
      continue;
    }
    scores.push_back(*o.score);
    dmos.push_back(o.dmos);
    auto& g = groups[o.tag];
    g.first.push_back(*o.score);
    g.second.push_back(o.dmos);
    if (o.psnr && std::isfinite(*o.psnr)) {
      psnr_values.push_back(*o.psnr);
      psnr_dmos.push_back(o.dmos);
    }
  }
  report.overall = correlate(scores, dmos);
  for (const auto& [tag, g] : groups) report.per_tag[tag] = correlate(g.first, g.second);
  report.psnr_baseline = correlate(psnr_values, psnr_dmos);
  report.entries = std::move(outcomes);
  return report;
}

CorrelationReport evaluate_dataset(const DatasetManifest& manifest, const MetricConfig& config,
                                   int threads) {
  if (manifest.entries.empty()) throw Error(ErrorCode::kEmptyManifest, "manifest has no entries");
  config.validate();
  std::vector<EntryOutcome> outcomes;
  outcomes.reserve(manifest.entries.size());
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    EntryOutcome o;
    o.index = i;
    o.tag = e.tag;
    o.dmos = e.dmos;
    try {
      const auto report = assess_files(e.reference, e.distorted, e.descriptor.width,
                                       e.descriptor.height, config, e.frame_range, threads);
      o.psnr = psnr_files(e.reference, e.distorted, e.descriptor.width, e.descriptor.height,
                          e.frame_range);
      o.score = report.video_score;
    } catch (const Error& err) {
      o.error_code = err.code();
      o.error = err.what();
    } catch (const std::exception& err) {
      o.error = err.what();
    }
    outcomes.push_back(std::move(o));
  }
  return assemble_report(std::move(outcomes));
}

}  // namespace tsvqa
