#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "tsvqa/error.hpp"
#include "tsvqa/eval.hpp"
#include "tsvqa/metric.hpp"
#include "tsvqa/spectral.hpp"
#include "tsvqa/synth.hpp"
#include "tsvqa/video_io.hpp"

namespace tsvqa::cli {

namespace {

using nlohmann::json;

struct MetricFlags {
  MetricConfig config;
  std::string normalize{to_string(config.plane_normalization)};
  std::string padding{to_string(config.padding)};
  int threads = 1;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--tensor-frames", config.tensor_len, "Frames per analysis tensor")
        ->capture_default_str();
    cmd.add_option("--window-radius", config.window_radius, "Gaussian window radius d")
        ->capture_default_str();
    cmd.add_option("--window-sigma", config.window_sigma, "Gaussian window sigma")
        ->capture_default_str();
    cmd.add_option("--stability-c", config.stability_c, "Stability constant C")
        ->capture_default_str();
    cmd.add_option("--beta", config.beta, "Temporal pooling exponent")->capture_default_str();
    cmd.add_option("--normalize", normalize, "TPSD plane normalization")
        ->check(CLI::IsMember({"ref-max", "none", "log10"}))
        ->capture_default_str();
    cmd.add_option("--center-dc", config.center_dc, "Shift DC to the plane center")
        ->capture_default_str();
    cmd.add_option("--padding", padding, "Window border policy")
        ->check(CLI::IsMember({"mirror", "valid"}))
        ->capture_default_str();
    cmd.add_option("--threads", threads, "Worker threads for windowed statistics")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  MetricConfig resolve() const {
    MetricConfig c = config;
    c.plane_normalization = *parse_normalization(normalize);
    c.padding = *parse_padding(padding);
    c.validate();
    return c;
  }
};

std::optional<FrameRange> parse_frames(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "--frames expects START:END, got '" + text + "'");
  }
  try {
    std::size_t used_first = 0;
    std::size_t used_last = 0;
    const std::string a = text.substr(0, colon);
    const std::string b = text.substr(colon + 1);
    const long long first = std::stoll(a, &used_first);
    const long long last = std::stoll(b, &used_last);
    if (used_first != a.size() || used_last != b.size() || first < 0 || last < first) {
      throw std::invalid_argument("range");
    }
    return FrameRange{static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "--frames expects START:END, got '" + text + "'");
  }
}

json config_json(const MetricConfig& c) {
  return {{"tensor_frames", c.tensor_len},
          {"window_radius", c.window_radius},
          {"window_sigma", c.window_sigma},
          {"stability_c", c.stability_c},
          {"beta", c.beta},
          {"normalize", std::string(to_string(c.plane_normalization))},
          {"center_dc", c.center_dc},
          {"padding", std::string(to_string(c.padding))}};
}

json optional_json(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

json pair_json(const CorrelationPair& p) {
  json j = {{"n", p.n}, {"pcc", optional_json(p.pcc)}, {"scc", optional_json(p.scc)}};
  j["abs_pcc"] = p.pcc ? json(std::abs(*p.pcc)) : json(nullptr);
  j["abs_scc"] = p.scc ? json(std::abs(*p.scc)) : json(nullptr);
  return j;
}

// Opens --out, or returns the default stream for "-".
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
      if (!*file_) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

struct ScoreArgs {
  std::string ref;
  std::string dist;
  int width = 0;
  int height = 0;
  std::string frames;
  std::string out = "-";
  MetricFlags metric;
};

int run_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const auto config = a.metric.resolve();
  const auto range = parse_frames(a.frames);
  const auto report =
      assess_files(a.ref, a.dist, a.width, a.height, config, range, a.metric.threads);

  OutputTarget target(a.out, out);
  auto& os = target.stream();
  double sum = 0.0;
  for (std::size_t i = 0; i < report.tensor_scores.size(); ++i) {
    const auto& span = report.tensors[i];
    os << json{{"record", "tensor"},
               {"index", span.index},
               {"first_frame", span.begin},
               {"depth", span.depth()},
               {"score", report.tensor_scores[i]}}
              .dump()
       << '\n';
    sum += report.tensor_scores[i];
  }
  const std::size_t first = report.tensors.front().begin;
  const std::size_t last = report.tensors.back().end - 1;
  os << json{{"record", "summary"},
             {"video_score", report.video_score},
             {"mean_tensor_score", sum / static_cast<double>(report.tensor_scores.size())},
             {"tensors", report.tensor_scores.size()},
             {"width", report.descriptor.width},
             {"height", report.descriptor.height},
             {"frame_count", report.descriptor.frame_count},
             {"frames_used", {first, last}},
             {"config", config_json(config)}}
            .dump()
     << '\n';
  const auto& t = report.timings;
  os << json{{"record", "timing"},
             {"read_s", t.read_s},
             {"transform_s", t.transform_s},
             {"correlate_s", t.correlate_s},
             {"pool_s", t.pool_s},
             {"total_s", t.total_s()}}
            .dump()
     << '\n';
  if (!os) throw Error(ErrorCode::kIoError, "failed writing score output");

  err << std::setprecision(6) << "P = " << report.video_score << " over "
      << report.tensor_scores.size() << " tensor(s), frames " << first << ".." << last
      << "; read " << t.read_s << " s, transform " << t.transform_s << " s, correlate "
      << t.correlate_s << " s, pool " << t.pool_s << " s\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string manifest;
  std::string out = "-";
  MetricFlags metric;
};

int run_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const auto config = a.metric.resolve();
  const auto manifest = load_manifest(a.manifest);
  const auto start = std::chrono::steady_clock::now();
  const auto report = evaluate_dataset(manifest, config, a.metric.threads);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json entries = json::array();
  for (const auto& e : report.entries) {
    json j = {{"index", e.index},
              {"tag", e.tag},
              {"dmos", e.dmos},
              {"score", optional_json(e.score)},
              {"psnr", optional_json(e.psnr)}};
    if (e.error_code) j["error_class"] = std::string(error_name(*e.error_code));
    if (!e.error.empty()) j["error"] = e.error;
    entries.push_back(std::move(j));
  }
  json per_tag = json::object();
  for (const auto& [tag, pair] : report.per_tag) per_tag[tag] = pair_json(pair);

  json doc = {{"record", "evaluation"},
              {"orientation",
               "raw correlation of metric score with DMOS; higher DMOS means worse quality, "
               "so agreement with viewers shows as negative pcc/scc"},
              {"n", report.overall.n},
              {"failed", report.failed},
              {"overall", pair_json(report.overall)},
              {"per_tag", per_tag},
              {"psnr_baseline", pair_json(report.psnr_baseline)},
              {"entries", entries},
              {"config", config_json(config)}};

  OutputTarget target(a.out, out);
  target.stream() << doc.dump(2) << '\n';
  if (!target.stream()) throw Error(ErrorCode::kIoError, "failed writing evaluation report");

  for (const auto& e : report.entries) {
    if (!e.score) {
      err << "tsvqa: entry " << e.index << " failed: error["
          << (e.error_code ? error_name(*e.error_code) : "Unknown") << "]: " << e.error << '\n';
    }
  }
  err << "evaluated " << report.overall.n << " of " << report.entries.size() << " entries in "
      << std::setprecision(4) << elapsed << " s\n";
  return kExitOk;
}

struct GenerateArgs {
  std::string out;
  std::string from;
  std::string pattern = "scene";
  int width = 128;
  int height = 128;
  int frames = 30;
  std::uint64_t seed = 1;
  std::string distortion;
  double level = 0.0;
  std::uint64_t distortion_seed = 0;
};

int run_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<LumaFrame> frames;
  if (!a.from.empty()) {
    frames = read_yuv420_luma(std::filesystem::path(a.from), a.width, a.height);
  } else if (a.pattern == "scene") {
    VideoDescriptor{a.width, a.height, 0}.validate();
    frames = make_scene_sequence(a.width, a.height, a.frames, a.seed);
  } else {
    VideoDescriptor{a.width, a.height, 0}.validate();
    frames = make_edge_sequence(a.width, a.height, a.pattern == "edge-motion");
  }

  json record = {{"record", "generated"},
                 {"path", a.out},
                 {"width", a.width},
                 {"height", a.height},
                 {"frames", frames.size()},
                 {"source", a.from.empty() ? a.pattern : a.from}};
  if (!a.distortion.empty()) {
    const auto kind = parse_distortion_kind(a.distortion);
    if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown distortion " + a.distortion);
    DistortionSpec spec{*kind, a.level, a.distortion_seed};
    frames = apply_distortion(frames, spec);
    record["distortion"] = {{"kind", a.distortion}, {"level", a.level},
                            {"seed", a.distortion_seed}};
  }
  write_yuv420(std::filesystem::path(a.out), frames);
  out << record.dump() << '\n';
  err << "wrote " << frames.size() << " frame(s) to " << a.out << '\n';
  return kExitOk;
}

struct DumpArgs {
  std::string ref;
  std::string dist;
  int width = 0;
  int height = 0;
  std::string frames;
  std::string out;
  MetricFlags metric;
};

void write_grid_file(const std::string& path, const RealPlane& plane) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  write_grid(file, plane);
}

int run_dump(const DumpArgs& a, std::ostream& out, std::ostream& err) {
  const auto config = a.metric.resolve();
  const auto range = parse_frames(a.frames);
  Yuv420Reader ref_reader(a.ref, a.width, a.height);
  std::optional<Yuv420Reader> dist_reader;
  if (!a.dist.empty()) {
    dist_reader.emplace(a.dist, a.width, a.height);
    if (dist_reader->descriptor().frame_count != ref_reader.descriptor().frame_count) {
      throw Error(ErrorCode::kFrameCountMismatch, "reference and distorted frame counts differ");
    }
  }
  const auto spans = tensor_spans(ref_reader.descriptor().frame_count,
                                  static_cast<std::size_t>(config.tensor_len), range);
  const auto window = gaussian_window(config.window_radius, config.window_sigma);

  std::size_t written = 0;
  const auto emit = [&](std::size_t tensor, const char* kind, const RealPlane& plane) {
    const std::string path = a.out + "_" + kind + "_t" + std::to_string(tensor) + ".grid";
    write_grid_file(path, plane);
    out << json{{"record", "grid"},
                {"tensor", tensor},
                {"kind", kind},
                {"path", path},
                {"rows", plane.rows()},
                {"cols", plane.cols()}}
               .dump()
        << '\n';
    ++written;
  };

  for (const auto& span : spans) {
    const auto ref_frames = ref_reader.read(span.begin, span.depth());
    if (dist_reader) {
      const auto dist_frames = dist_reader->read(span.begin, span.depth());
      const auto result =
          analyze_tensor_pair(ref_frames, dist_frames, config, window, a.metric.threads);
      emit(span.index, "ref", result.reference.values);
      emit(span.index, "dist", result.distorted.values);
      emit(span.index, "zeta", result.zeta.values);
    } else {
      auto plane = tensor_tpsd(ref_frames, config.center_dc);
      auto twin = plane;
      normalize_planes(plane, twin, config.plane_normalization);
      emit(span.index, "ref", plane.values);
    }
  }
  err << "wrote " << written << " grid file(s) with prefix " << a.out << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Full-reference video quality from tempospatial power spectral density", "tsvqa"};
  app.require_subcommand(1);

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score a distorted video against its reference");
  score_cmd->add_option("--ref", score.ref, "Reference YUV420 file")->required();
  score_cmd->add_option("--dist", score.dist, "Distorted YUV420 file")->required();
  score_cmd->add_option("--width", score.width, "Frame width")->required();
  score_cmd->add_option("--height", score.height, "Frame height")->required();
  score_cmd->add_option("--frames", score.frames, "Inclusive frame range START:END");
  score_cmd->add_option("--out", score.out, "Output file for records ('-' = stdout)");
  score.metric.add_to(*score_cmd);

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Correlate metric scores with DMOS");
  eval_cmd->add_option("--manifest", evaluate.manifest, "Dataset manifest (CSV)")->required();
  eval_cmd->add_option("--out", evaluate.out, "Report file ('-' = stdout)");
  evaluate.metric.add_to(*eval_cmd);

  GenerateArgs generate;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic YUV420 fixture");
  gen_cmd->add_option("--out", generate.out, "Output YUV420 file")->required();
  gen_cmd->add_option("--from", generate.from, "Distort this YUV420 file instead of generating");
  gen_cmd->add_option("--pattern", generate.pattern, "Synthetic content")
      ->check(CLI::IsMember({"scene", "edge-static", "edge-motion"}))
      ->capture_default_str();
  gen_cmd->add_option("--width", generate.width, "Frame width")->capture_default_str();
  gen_cmd->add_option("--height", generate.height, "Frame height")->capture_default_str();
  gen_cmd->add_option("--frames", generate.frames, "Frame count for scene content")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_cmd->add_option("--seed", generate.seed, "Scene seed")->capture_default_str();
  gen_cmd->add_option("--distortion", generate.distortion, "Distortion to apply")
      ->check(CLI::IsMember({"gaussian-noise", "gaussian-blur", "block-quantize",
                             "frame-freeze"}));
  gen_cmd->add_option("--level", generate.level, "Distortion level");
  gen_cmd->add_option("--distortion-seed", generate.distortion_seed, "Distortion seed")
      ->capture_default_str();

  DumpArgs dump;
  auto* dump_cmd = app.add_subcommand("dump-tpsd", "Write TPSD planes (and zeta maps) as grids");
  dump_cmd->add_option("--ref", dump.ref, "Reference YUV420 file")->required();
  dump_cmd->add_option("--dist", dump.dist, "Distorted YUV420 file; adds dist and zeta grids");
  dump_cmd->add_option("--width", dump.width, "Frame width")->required();
  dump_cmd->add_option("--height", dump.height, "Frame height")->required();
  dump_cmd->add_option("--frames", dump.frames, "Inclusive frame range START:END");
  dump_cmd->add_option("--out", dump.out, "Output path prefix")->required();
  dump.metric.add_to(*dump_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (score_cmd->parsed()) return run_score(score, out, err);
    if (eval_cmd->parsed()) return run_evaluate(evaluate, out, err);
    if (gen_cmd->parsed()) {
      if (!generate.distortion.empty() && !(generate.level > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "--distortion needs a positive --level");
      }
      return run_generate(generate, out, err);
    }
    if (dump_cmd->parsed()) return run_dump(dump, out, err);
  } catch (const Error& e) {
    err << "tsvqa: error[" << error_name(e.code()) << "]: " << e.what() << '\n';
    return kLibraryErrorBase + static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "tsvqa: error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace tsvqa::cli
