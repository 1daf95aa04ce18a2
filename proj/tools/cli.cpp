#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "CLI11.hpp"
#include "json.hpp"
#include "vltrack/dataset.hpp"
#include "vltrack/localizer.hpp"
#include "vltrack/metrics.hpp"
#include "vltrack/prompting.hpp"
#include "vltrack/remote_localizer.hpp"
#include "vltrack/report.hpp"
#include "vltrack/samplegen.hpp"
#include "vltrack/synthetic.hpp"
#include "vltrack/tracker.hpp"

namespace vltrack::cli {
namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BackendOptions {
  bool mock_oracle = false;
  std::string mock_script;
  std::string endpoint;
  std::string model;
  std::string api_key;
  std::string path = "/v1/chat/completions";
  double timeout_s = 120.0;
  int attempts = 3;
  double backoff_s = 0.5;
  int max_in_flight = 4;
  double temperature = 0.0;
  bool no_temperature = false;
};

struct PromptOptions {
  bool no_vp = false;
  std::string template_file;
  double enlarge = 2.0;
  int thickness = 0;
  std::string color = "255,0,0";
};

struct TrackOptions {
  std::string dataset;
  std::string layout = "tnl2k";
  std::string out;
  std::string transcript;
  int workers = 0;
  BackendOptions backend;
  PromptOptions prompt;
};

struct EvalOptions {
  std::string dataset;
  std::string layout = "tnl2k";
  std::string results;
  std::string report;
};

struct GenOptions {
  std::string tnl2k;
  std::string tnllt;
  std::string tnl2k_layout = "tnl2k";
  std::string tnllt_layout = "tnllt";
  std::string out;
  std::size_t count = 1000;
  double mix = 0.7;
  double neg_frac = 0.2;
  std::uint64_t seed = 0;
  int max_gap = 30;
  double center_sigma = 0.1;
  double scale_min = 0.8;
  double scale_max = 1.25;
  PromptOptions prompt;
};

struct TraceOptions {
  std::string dataset;
  std::string layout = "tnl2k";
  std::string sequence;
  std::string out;
  BackendOptions backend;
  PromptOptions prompt;
};

struct FixtureOptions {
  std::string out;
  std::string layout = "tnl2k";
  std::size_t count = 3;
  std::size_t frames = 10;
  std::uint64_t seed = 7;
};

void add_backend_options(CLI::App* app, BackendOptions& o) {
  auto* oracle = app->add_flag("--mock-oracle", o.mock_oracle,
                               "Answer with the dataset ground truth (offline)");
  auto* script = app->add_option("--mock-script", o.mock_script,
                                 "Replay raw model replies from a transcript file");
  app->add_option("--endpoint", o.endpoint, "Chat-completions base URL")
      ->envname("VLTRACK_ENDPOINT");
  oracle->excludes(script);
  app->add_option("--model", o.model, "Model name")->envname("VLTRACK_MODEL");
  app->add_option("--api-key", o.api_key, "Bearer token")
      ->envname("VLTRACK_API_KEY")
      ->configurable(false);
  app->add_option("--endpoint-path", o.path, "Request path")->capture_default_str();
  app->add_option("--timeout", o.timeout_s, "Per-attempt timeout in seconds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--attempts", o.attempts, "Attempts per request on transport errors")
      ->capture_default_str()
      ->check(CLI::Range(1, 100));
  app->add_option("--backoff", o.backoff_s, "Initial retry backoff in seconds")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app->add_option("--max-in-flight", o.max_in_flight, "Concurrent requests cap")
      ->capture_default_str()
      ->check(CLI::Range(1, 1024));
  app->add_option("--temperature", o.temperature, "Sampling temperature")->capture_default_str();
  app->add_flag("--no-temperature", o.no_temperature, "Do not send a temperature field");
}

void add_prompt_options(CLI::App* app, PromptOptions& o) {
  app->add_flag("--no-vp", o.no_vp, "Disable the visual prompt (ablation)");
  app->add_option("--template", o.template_file, "Instruction template file")
      ->check(CLI::ExistingFile);
  app->add_option("--enlarge", o.enlarge, "Prompt enlargement factor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--thickness", o.thickness, "Prompt stroke width in pixels (0 = auto)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app->add_option("--color", o.color, "Prompt color as R,G,B")->capture_default_str();
}

Rgb parse_color(const std::string& s) {
  int r = 0, g = 0, b = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d,%d,%d%c", &r, &g, &b, &tail) != 3 || r < 0 || r > 255 ||
      g < 0 || g > 255 || b < 0 || b > 255) {
    throw UsageError("--color must be R,G,B with components in 0..255");
  }
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
          static_cast<std::uint8_t>(b)};
}

PromptStyle make_style(const PromptOptions& o) {
  PromptStyle style;
  style.color = parse_color(o.color);
  style.enlarge_factor = o.enlarge;
  if (o.thickness > 0) style.thickness = o.thickness;
  style.validate();
  return style;
}

InstructionTemplate make_template(const PromptOptions& o) {
  return o.template_file.empty() ? InstructionTemplate::default_template()
                                 : InstructionTemplate::load(o.template_file);
}

LayoutConfig make_layout(const std::string& s) {
  try {
    return LayoutConfig::resolve(s);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

void require_dir(const std::string& path, const std::string& flag) {
  if (!fs::is_directory(path)) throw UsageError(flag + ": not a directory: " + path);
}

void require_writable_target(const std::string& path, const std::string& flag) {
  if (fs::exists(path) && !fs::is_directory(path)) {
    throw UsageError(flag + ": exists and is not a directory: " + path);
  }
}

EndpointConfig make_endpoint(const BackendOptions& o) {
  EndpointConfig cfg;
  cfg.base_url = o.endpoint;
  cfg.path = o.path;
  cfg.model = o.model;
  cfg.api_key = o.api_key;
  cfg.timeout_s = o.timeout_s;
  cfg.max_attempts = o.attempts;
  cfg.backoff_initial_s = o.backoff_s;
  cfg.max_in_flight = o.max_in_flight;
  if (o.no_temperature) {
    cfg.temperature.reset();
  } else {
    cfg.temperature = o.temperature;
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("remote backend: ") + e.what() +
                     " (use --endpoint/--model, VLTRACK_ENDPOINT/VLTRACK_MODEL, or a mock)");
  }
  return cfg;
}

void check_backend(const BackendOptions& o) {
  if (o.mock_oracle) return;
  if (!o.mock_script.empty()) {
    if (!fs::is_regular_file(o.mock_script)) {
      throw UsageError("--mock-script: no such file: " + o.mock_script);
    }
    return;
  }
  make_endpoint(o);
}

std::string backend_name(const BackendOptions& o) {
  if (o.mock_oracle) return "mock-oracle";
  if (!o.mock_script.empty()) return "mock-script";
  return "remote";
}

std::shared_ptr<Localizer> make_localizer(const BackendOptions& o,
                                          const std::vector<Sequence>& sequences) {
  if (o.mock_oracle) {
    std::map<std::string, std::vector<BBox>> truth;
    for (const auto& s : sequences) truth[s.name] = s.groundtruth;
    return std::make_shared<OracleLocalizer>(std::move(truth));
  }
  if (!o.mock_script.empty()) {
    return std::make_shared<ScriptedLocalizer>(ScriptedLocalizer::from_file(o.mock_script));
  }
  return std::make_shared<RemoteLocalizer>(make_endpoint(o));
}

ordered_json style_json(const PromptStyle& s) {
  ordered_json j;
  j["color"] = {s.color.r, s.color.g, s.color.b};
  j["thickness"] = s.thickness ? ordered_json(*s.thickness) : ordered_json("auto");
  j["enlarge_factor"] = s.enlarge_factor;
  return j;
}

ordered_json endpoint_json(const BackendOptions& o) {
  ordered_json j;
  j["kind"] = backend_name(o);
  if (!o.mock_script.empty()) j["script"] = fs::absolute(o.mock_script).string();
  if (backend_name(o) == "remote") {
    j["endpoint"] = o.endpoint;
    j["path"] = o.path;
    j["model"] = o.model;
    j["timeout_s"] = o.timeout_s;
    j["attempts"] = o.attempts;
    j["backoff_s"] = o.backoff_s;
    j["max_in_flight"] = o.max_in_flight;
    j["temperature"] = o.no_temperature ? ordered_json(nullptr) : ordered_json(o.temperature);
  }
  return j;
}

TranscriptEntry transcript_entry(const StepRecord& r) {
  TranscriptEntry e;
  e.sequence = r.sequence;
  e.frame_index = r.frame_index;
  e.status = std::string(to_string(r.response.status));
  e.raw_text = r.response.raw_text;
  e.box = r.response.box;
  e.latency_ms = r.response.latency_ms;
  e.instruction = r.request.instruction;
  e.prompt_rect = r.prompt_rect;
  e.frame_digest = image_digest(r.request.frame);
  e.source_digest = image_digest(r.source_frame);
  return e;
}

/// Appends transcript lines from concurrent workers.
class TranscriptSink {
 public:
  explicit TranscriptSink(const fs::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DataError(path.string() + ": cannot write transcript");
  }
  void operator()(const StepRecord& r) {
    const std::string line = transcript_entry(r).to_json_line();
    std::lock_guard lock(mu_);
    out_ << line << "\n";
    out_.flush();
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

std::string iso_time_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot write");
  out << text;
}

// ---------------------------------------------------------------- track

int cmd_track(const TrackOptions& o, const std::string& config_snapshot) {
  require_dir(o.dataset, "--dataset");
  require_writable_target(o.out, "--out");
  const LayoutConfig layout = make_layout(o.layout);
  const PromptStyle style = make_style(o.prompt);
  const InstructionTemplate tmpl = make_template(o.prompt);
  check_backend(o.backend);
  if (!o.transcript.empty()) {
    const auto parent = fs::absolute(o.transcript).parent_path();
    if (!fs::is_directory(parent)) throw UsageError("--transcript: directory does not exist");
  }
  if (o.workers < 0) throw UsageError("--workers must be >= 1");

  SplitLoad split = load_split(o.dataset, layout);
  auto localizer = make_localizer(o.backend, split.sequences);

  int workers = o.workers > 0 ? o.workers
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, o.backend.max_in_flight);
  workers = std::max(1, std::min<int>(workers, static_cast<int>(split.sequences.size())));

  fs::create_directories(o.out);
  std::unique_ptr<TranscriptSink> sink;
  if (!o.transcript.empty()) sink = std::make_unique<TranscriptSink>(o.transcript);

  TrackConfig cfg;
  cfg.vp_enabled = !o.prompt.no_vp;
  cfg.prompt_style = style;
  cfg.instruction_template = tmpl;
  cfg.localizer = localizer;
  if (sink) cfg.observer = [&sink](const StepRecord& r) { (*sink)(r); };

  struct Outcome {
    bool ok = false;
    double seconds = 0.0;
    std::string error;
  };
  std::vector<Outcome> outcomes(split.sequences.size());
  std::atomic<std::size_t> next{0};
  const auto started = Clock::now();
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < split.sequences.size(); i = next++) {
          const auto& seq = split.sequences[i];
          const auto t0 = Clock::now();
          try {
            const ResultTrack track = track_sequence(seq, cfg);
            write_results(track, fs::path(o.out) / (seq.name + ".txt"));
            outcomes[i].ok = true;
          } catch (const std::exception& e) {
            outcomes[i].error = e.what();
          }
          outcomes[i].seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        }
      });
    }
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - started).count();

  ordered_json manifest;
  manifest["schema"] = "vltrack.run/1";
  manifest["tool"] = "vltrack";
  manifest["version"] = VLTRACK_VERSION;
  manifest["command"] = "track";
  manifest["started_at"] = iso_time_now();
  manifest["config"]["dataset"] = fs::absolute(o.dataset).string();
  manifest["config"]["layout"] = layout.to_string();
  manifest["config"]["vp_enabled"] = cfg.vp_enabled;
  manifest["config"]["prompt_style"] = style_json(style);
  manifest["config"]["instruction_template"] = tmpl.text();
  manifest["config"]["fallback_policy"] = "repeat_last";
  manifest["config"]["backend"] = endpoint_json(o.backend);
  manifest["config"]["workers"] = workers;
  manifest["config"]["transcript"] = o.transcript;
  manifest["config_file"] = "config.ini";
  manifest["elapsed_s"] = elapsed;
  std::size_t failed = 0;
  manifest["sequences"] = ordered_json::array();
  for (std::size_t i = 0; i < split.sequences.size(); ++i) {
    ordered_json s;
    s["name"] = split.sequences[i].name;
    s["frames"] = split.sequences[i].size();
    s["status"] = outcomes[i].ok ? "ok" : "failed";
    s["seconds"] = outcomes[i].seconds;
    if (!outcomes[i].ok) {
      s["error"] = outcomes[i].error;
      ++failed;
    }
    manifest["sequences"].push_back(s);
  }
  manifest["load_failures"] = ordered_json::array();
  for (const auto& f : split.failures) {
    manifest["load_failures"].push_back({{"name", f.sequence}, {"error", f.reason}});
  }
  write_file(fs::path(o.out) / "manifest.json", manifest.dump(2) + "\n");
  write_file(fs::path(o.out) / "config.ini", config_snapshot);

  const std::size_t total_failed = failed + split.failures.size();
  std::cout << "tracked " << (split.sequences.size() - failed) << "/"
            << (split.sequences.size() + split.failures.size()) << " sequences in " << elapsed
            << " s -> " << o.out << "\n";
  if (total_failed > 0) {
    std::cerr << total_failed << " sequence(s) failed:\n";
    for (const auto& f : split.failures) std::cerr << "  " << f.sequence << ": " << f.reason << "\n";
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (!outcomes[i].ok) {
        std::cerr << "  " << split.sequences[i].name << ": " << outcomes[i].error << "\n";
      }
    }
    return kExitPartial;
  }
  return kExitOk;
}

// ----------------------------------------------------------------- eval

int cmd_eval(const EvalOptions& o) {
  require_dir(o.dataset, "--dataset");
  require_dir(o.results, "--results");
  const std::string report_dir = o.report.empty() ? o.results : o.report;
  require_writable_target(report_dir, "--report");
  const LayoutConfig layout = make_layout(o.layout);

  SplitLoad split = load_split(o.dataset, layout);
  std::vector<std::string> problems;
  for (const auto& f : split.failures) problems.push_back(f.sequence + ": " + f.reason);

  std::map<std::string, SequenceScores> scored;
  for (const auto& seq : split.sequences) {
    try {
      const ResultTrack track = read_results(fs::path(o.results) / (seq.name + ".txt"), seq.name);
      scored.emplace(seq.name, score_sequence(track, seq));
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
  }
  if (scored.empty()) {
    for (const auto& p : problems) std::cerr << "  " << p << "\n";
    std::cerr << "no sequence could be evaluated\n";
    return kExitPartial;
  }
  const EvalResult result = aggregate(std::move(scored));
  fs::create_directories(report_dir);
  write_file(fs::path(report_dir) / "report.json", report_json(result));
  write_curve_csvs(result, report_dir);
  std::cout << report_table(result);
  if (!problems.empty()) {
    std::cerr << problems.size() << " sequence(s) not evaluated:\n";
    for (const auto& p : problems) std::cerr << "  " << p << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

// ----------------------------------------------------------- gensamples

int cmd_gensamples(const GenOptions& o) {
  require_dir(o.tnl2k, "--tnl2k");
  require_dir(o.tnllt, "--tnllt");
  require_writable_target(o.out, "--out");
  GenConfig cfg;
  cfg.total_count = o.count;
  cfg.mix_ratio = o.mix;
  cfg.negative_fraction = o.neg_frac;
  cfg.seed = o.seed;
  cfg.max_temporal_gap = o.max_gap;
  cfg.jitter = {o.center_sigma, o.scale_min, o.scale_max};
  cfg.prompt_style = make_style(o.prompt);
  cfg.instruction_template = make_template(o.prompt);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  GenInputs inputs{o.tnl2k, o.tnllt, make_layout(o.tnl2k_layout), make_layout(o.tnllt_layout)};
  const GenSummary s = generate(cfg, inputs, o.out);
  std::cout << "wrote " << s.count << " samples (" << s.per_dataset[0] << " tnl2k, "
            << s.per_dataset[1] << " tnllt, " << s.negatives << " negative prompts";
  if (s.negative_fallbacks) std::cout << ", " << s.negative_fallbacks << " negative fallbacks";
  std::cout << ") -> " << s.manifest_path.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- trace

std::string frame_tag(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu", t);
  return buf;
}

cv::Mat overlay(const cv::Mat& frame, const BBox& pred, const BBox& gt) {
  cv::Mat out = frame.clone();
  const ImageSize size = ImageSize::of(frame);
  if (!gt.degenerate()) {
    const PixelRect r = pixel_region(gt, size);
    if (!r.empty()) cv::rectangle(out, r.to_cv(), cv::Scalar(0, 200, 0), 1);
  }
  if (!pred.degenerate()) {
    const PixelRect r = pixel_region(pred, size);
    if (!r.empty()) cv::rectangle(out, r.to_cv(), cv::Scalar(0, 0, 255), 1);
  }
  return out;
}

int cmd_trace(const TraceOptions& o) {
  require_dir(o.dataset, "--dataset");
  require_writable_target(o.out, "--out");
  const LayoutConfig layout = make_layout(o.layout);
  const PromptStyle style = make_style(o.prompt);
  const InstructionTemplate tmpl = make_template(o.prompt);
  check_backend(o.backend);

  Sequence seq;
  if (o.sequence.empty()) {
    SplitLoad split = load_split(o.dataset, layout);
    if (split.sequences.empty()) throw DataError(o.dataset + ": no loadable sequence");
    seq = std::move(split.sequences.front());
  } else {
    const fs::path dir = fs::path(o.dataset) / o.sequence;
    if (!fs::is_directory(dir)) throw UsageError("--sequence: no such sequence: " + o.sequence);
    seq = load_sequence(dir, layout);
  }
  auto localizer = make_localizer(o.backend, {seq});

  const fs::path out(o.out);
  fs::create_directories(out);
  TranscriptSink sink(out / "transcript.jsonl");

  TrackConfig cfg;
  cfg.vp_enabled = !o.prompt.no_vp;
  cfg.prompt_style = style;
  cfg.instruction_template = tmpl;
  cfg.localizer = localizer;
  const std::vector<int> png = {cv::IMWRITE_PNG_COMPRESSION, 3};
  cfg.observer = [&](const StepRecord& r) {
    sink(r);
    const std::string tag = frame_tag(r.frame_index);
    cv::imwrite((out / (tag + "_prompted.png")).string(), r.request.frame, png);
    ordered_json req;
    req["sequence"] = r.sequence;
    req["frame"] = r.frame_index;
    req["frame_size"] = {r.request.frame_size.width, r.request.frame_size.height};
    req["prompt_rect"] = r.prompt_rect ? ordered_json::array({r.prompt_rect->x0, r.prompt_rect->y0,
                                                              r.prompt_rect->x1, r.prompt_rect->y1})
                                       : ordered_json(nullptr);
    req["instruction"] = r.request.instruction;
    write_file(out / (tag + "_request.json"), req.dump(2) + "\n");
    std::string resp = r.response.raw_text;
    if (!r.response.error.empty()) resp += "\n[" + std::string(to_string(r.response.status)) +
                                           "] " + r.response.error;
    write_file(out / (tag + "_response.txt"), resp + "\n");
    cv::imwrite((out / (tag + "_overlay.png")).string(),
                overlay(r.source_frame, r.prediction, seq.groundtruth[r.frame_index - 1]), png);
  };

  // Frame 1 is the initialization: no query, prompted image = raw frame.
  const cv::Mat first = read_frame(seq.frames.front());
  const std::string tag = frame_tag(1);
  cv::imwrite((out / (tag + "_prompted.png")).string(), first, png);
  write_file(out / (tag + "_response.txt"),
             "[initialization] " + format_box(seq.groundtruth.front()) + "\n");
  cv::imwrite((out / (tag + "_overlay.png")).string(),
              overlay(first, seq.groundtruth.front(), seq.groundtruth.front()), png);

  const ResultTrack track = track_sequence(seq, cfg);
  write_results(track, out / (seq.name + ".txt"));
  std::cout << "traced " << seq.name << " (" << seq.size() << " frames) -> " << o.out << "\n";
  return kExitOk;
}

// --------------------------------------------------------- make-fixture

int cmd_make_fixture(const FixtureOptions& o) {
  require_writable_target(o.out, "--out");
  const LayoutConfig layout = make_layout(o.layout);
  if (o.count < 1 || o.frames < 2) throw UsageError("--count >= 1 and --frames >= 2 required");
  write_synthetic_split(o.out, layout, o.count, o.frames, o.seed);
  std::cout << "wrote " << o.count << " synthetic sequences (" << layout.name << " layout) -> "
            << o.out << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Global vision-language tracking harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Configuration file (INI/TOML); flags take precedence");
  app.set_version_flag("--version", VLTRACK_VERSION);

  TrackOptions track;
  auto* track_cmd = app.add_subcommand("track", "Track every sequence of a split");
  track_cmd->add_option("--dataset", track.dataset, "Split root directory")->required();
  track_cmd->add_option("--layout", track.layout, "tnl2k, tnllt or a layout file")
      ->capture_default_str();
  track_cmd->add_option("--out", track.out, "Results directory")->required();
  track_cmd->add_option("--workers", track.workers, "Parallel sequences (default: host threads)")
      ->check(CLI::PositiveNumber);
  track_cmd->add_option("--transcript", track.transcript, "Write a JSONL transcript here");
  add_backend_options(track_cmd, track.backend);
  add_prompt_options(track_cmd, track.prompt);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score results files against ground truth");
  eval_cmd->add_option("--dataset", eval.dataset, "Split root directory")->required();
  eval_cmd->add_option("--layout", eval.layout, "tnl2k, tnllt or a layout file")
      ->capture_default_str();
  eval_cmd->add_option("--results", eval.results, "Directory of <sequence>.txt files")->required();
  eval_cmd->add_option("--report", eval.report, "Report directory (default: --results)");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gensamples", "Generate fine-tuning samples");
  gen_cmd->add_option("--tnl2k", gen.tnl2k, "TNL2K-style split root")->required();
  gen_cmd->add_option("--tnllt", gen.tnllt, "TNLLT-style split root")->required();
  gen_cmd->add_option("--tnl2k-layout", gen.tnl2k_layout)->capture_default_str();
  gen_cmd->add_option("--tnllt-layout", gen.tnllt_layout)->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--count", gen.count, "Number of samples")->capture_default_str();
  gen_cmd->add_option("--mix", gen.mix, "TNL2K share")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--neg-frac", gen.neg_frac, "Negative-prompt share")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--max-gap", gen.max_gap, "Max temporal gap for positive prompts")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--center-sigma", gen.center_sigma)->capture_default_str();
  gen_cmd->add_option("--scale-min", gen.scale_min)->capture_default_str();
  gen_cmd->add_option("--scale-max", gen.scale_max)->capture_default_str();
  gen_cmd->add_option("--template", gen.prompt.template_file, "Instruction template file")
      ->check(CLI::ExistingFile);
  gen_cmd->add_option("--enlarge", gen.prompt.enlarge)->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--thickness", gen.prompt.thickness)->capture_default_str();
  gen_cmd->add_option("--color", gen.prompt.color)->capture_default_str();

  TraceOptions trace;
  auto* trace_cmd = app.add_subcommand("trace", "Dump per-frame requests and replies of one sequence");
  trace_cmd->add_option("--dataset", trace.dataset, "Split root directory")->required();
  trace_cmd->add_option("--layout", trace.layout)->capture_default_str();
  trace_cmd->add_option("--sequence", trace.sequence, "Sequence name (default: first)");
  trace_cmd->add_option("--out", trace.out, "Dump directory")->required();
  add_backend_options(trace_cmd, trace.backend);
  add_prompt_options(trace_cmd, trace.prompt);

  FixtureOptions fixture;
  auto* fixture_cmd = app.add_subcommand("make-fixture", "Write a synthetic dataset split");
  fixture_cmd->add_option("--out", fixture.out, "Split root to create")->required();
  fixture_cmd->add_option("--layout", fixture.layout)->capture_default_str();
  fixture_cmd->add_option("--count", fixture.count)->capture_default_str();
  fixture_cmd->add_option("--frames", fixture.frames)->capture_default_str();
  fixture_cmd->add_option("--seed", fixture.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*track_cmd) {
      // Snapshot only the track section; replay with `--config FILE track`.
      std::istringstream all(app.config_to_str(true, false));
      std::string snapshot, line;
      while (std::getline(all, line)) {
        const bool empty_value = line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0;
        if (line.rfind("track.", 0) == 0 && !empty_value) snapshot += line + "\n";
      }
      return cmd_track(track, snapshot);
    }
    if (*eval_cmd) return cmd_eval(eval);
    if (*gen_cmd) return cmd_gensamples(gen);
    if (*trace_cmd) return cmd_trace(trace);
    if (*fixture_cmd) return cmd_make_fixture(fixture);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PromptError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"vltrack"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace vltrack::cli
