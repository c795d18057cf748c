#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>

#include "convspectra/array_io.hpp"
#include "convspectra/bench.hpp"
#include "convspectra/oracle.hpp"
#include "convspectra/parallel.hpp"
#include "convspectra/projection.hpp"
#include "convspectra/spectra.hpp"

namespace convspectra::cli {

namespace {

using nlohmann::json;

struct Config {
  std::string kernel_path;
  std::vector<std::size_t> input_shape;
  std::optional<double> bound;
  int rounds = 1;
  std::string out_path;
  std::optional<std::size_t> top;
  std::string mode = "values";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::vector<std::size_t> kernel_shape;
  bool json = false;

  // oracle-check / bench
  std::size_t max_dim = oracle::kDefaultMaxDimension;
  bool force = false;
  std::string grid;
  std::string method = "both";
  int repeats = 5;
  int warmup = 1;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoFailure: return kIoError;
    case ErrorCode::NoConvergence:
    case ErrorCode::ImaginaryResidual: return kNumericalFailure;
    default: return kValidationError;
  }
}

FeatureShape feature_shape(const Config& cfg) {
  if (cfg.input_shape.size() != 2 || cfg.input_shape[0] == 0 || cfg.input_shape[1] == 0)
    throw Error(ErrorCode::InvalidShape, "--input-shape needs two positive integers");
  return {cfg.input_shape[0], cfg.input_shape[1]};
}

double positive_bound(const Config& cfg) {
  if (!cfg.bound || !(*cfg.bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "--bound must be > 0");
  return *cfg.bound;
}

void print_json(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

json report_json(const ClipReport& r) {
  return {{"requested_bound", r.requested_bound},
          {"norm_before", r.norm_before},
          {"norm_after_clip", r.norm_after_clip},
          {"norm_after_restriction", r.norm_after_restriction},
          {"bins_modified", r.bins_modified},
          {"max_imaginary_residual", r.max_imaginary_residual}};
}

void print_report(std::ostream& out, const ClipReport& r) {
  out << "requested_bound: " << io::format_double(r.requested_bound) << '\n'
      << "norm_before: " << io::format_double(r.norm_before) << '\n'
      << "norm_after_clip: " << io::format_double(r.norm_after_clip) << '\n'
      << "norm_after_restriction: " << io::format_double(r.norm_after_restriction) << '\n'
      << "bins_modified: " << r.bins_modified << '\n'
      << "max_imaginary_residual: " << io::format_double(r.max_imaginary_residual) << '\n';
}

int cmd_spectrum(const Config& cfg, std::ostream& out) {
  const FeatureShape shape = feature_shape(cfg);
  const Kernel4D kernel = io::read_kernel(cfg.kernel_path);
  const io::ExportMode mode = io::parse_export_mode(cfg.mode);
  const SpectrumReport report =
      make_report(std::filesystem::path(cfg.kernel_path).stem().string(), compute_spectrum(kernel, shape));

  const auto& values = report.spectrum.values;
  const std::size_t shown = cfg.top ? std::min(*cfg.top, values.size()) : 0;
  if (cfg.json) {
    json j = {{"layer", report.layer_name},
              {"count", report.spectrum.count()},
              {"operator_norm", report.operator_norm}};
    if (cfg.top) j["top"] = std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(shown));
    print_json(out, j);
  } else {
    out << "layer: " << report.layer_name << '\n'
        << "count: " << report.spectrum.count() << '\n'
        << "operator_norm: " << io::format_double(report.operator_norm) << '\n';
    for (std::size_t i = 0; i < shown; ++i) out << "value[" << i << "]: " << io::format_double(values[i]) << '\n';
  }
  if (!cfg.out_path.empty()) io::write_spectrum_csv(report, cfg.out_path, mode);
  return kOk;
}

int cmd_clip(const Config& cfg, std::ostream& out) {
  const FeatureShape shape = feature_shape(cfg);
  const double bound = positive_bound(cfg);
  const Kernel4D kernel = io::read_kernel(cfg.kernel_path);
  const ProjectionResult result = project_layer(kernel, shape, bound, cfg.rounds);
  io::write_kernel(result.kernel, cfg.out_path);
  if (cfg.json) {
    json j = report_json(result.report);
    j["rounds"] = cfg.rounds;
    print_json(out, j);
  } else {
    out << "rounds: " << cfg.rounds << '\n';
    print_report(out, result.report);
  }
  return kOk;
}

int cmd_clip_reshaped(const Config& cfg, std::ostream& out) {
  const FeatureShape shape = feature_shape(cfg);
  const double bound = positive_bound(cfg);
  const Kernel4D kernel = io::read_kernel(cfg.kernel_path);
  validate_pair(kernel, shape);
  const ReshapedClipResult result = clip_reshaped(kernel, bound);
  io::write_kernel(result.kernel, cfg.out_path);

  const double layer_before = operator_norm(kernel, shape);
  const double layer_after = operator_norm(result.kernel, shape);
  if (cfg.json) {
    print_json(out, {{"requested_bound", bound},
                     {"reshaped_norm_before", result.reshaped_norm_before},
                     {"reshaped_norm_after", result.reshaped_norm_after},
                     {"layer_norm_before", layer_before},
                     {"layer_norm_after", layer_after}});
  } else {
    out << "requested_bound: " << io::format_double(bound) << '\n'
        << "reshaped_norm_before: " << io::format_double(result.reshaped_norm_before) << '\n'
        << "reshaped_norm_after: " << io::format_double(result.reshaped_norm_after) << '\n'
        << "layer_norm_before: " << io::format_double(layer_before) << '\n'
        << "layer_norm_after: " << io::format_double(layer_after) << '\n';
  }
  return kOk;
}

int cmd_oracle_check(const Config& cfg, std::ostream& out) {
  const FeatureShape shape = feature_shape(cfg);
  const Kernel4D kernel = io::read_kernel(cfg.kernel_path);
  const oracle::Limits limits{cfg.max_dim, cfg.force};
  const Spectrum dense = oracle::dense_spectrum(kernel, shape, limits);
  const Spectrum exact = compute_spectrum(kernel, shape);
  const double deviation = oracle::max_relative_deviation(exact, dense);
  const bool ok = deviation <= kOracleTolerance;
  if (cfg.json) {
    print_json(out, {{"count", exact.count()},
                     {"operator_norm", exact.max()},
                     {"dense_operator_norm", dense.max()},
                     {"max_relative_deviation", deviation},
                     {"tolerance", kOracleTolerance},
                     {"pass", ok}});
  } else {
    out << "count: " << exact.count() << '\n'
        << "operator_norm: " << io::format_double(exact.max()) << '\n'
        << "dense_operator_norm: " << io::format_double(dense.max()) << '\n'
        << "max_relative_deviation: " << io::format_double(deviation) << '\n'
        << "result: " << (ok ? "PASS" : "FAIL") << '\n';
  }
  return ok ? kOk : kNumericalFailure;
}

int cmd_generate(const Config& cfg, std::ostream& out) {
  if (cfg.kernel_shape.size() != 4) throw Error(ErrorCode::InvalidShape, "--shape needs four integers");
  const KernelShape shape{cfg.kernel_shape[0], cfg.kernel_shape[1], cfg.kernel_shape[2], cfg.kernel_shape[3]};
  const std::uint64_t seed =
      cfg.seed ? *cfg.seed
               : static_cast<std::uint64_t>(std::chrono::system_clock::now().time_since_epoch().count());
  const Kernel4D kernel = random_normal_kernel(shape, seed);
  io::write_kernel(kernel, cfg.out_path);
  if (cfg.json)
    print_json(out, {{"seed", seed}, {"out", cfg.out_path}});
  else
    out << "seed: " << seed << '\n' << "out: " << cfg.out_path << '\n';
  return kOk;
}

int cmd_bench(const Config& cfg, std::ostream& out) {
  const auto cells = bench::parse_grid(cfg.grid);
  const auto specs = bench::make_specs(cells, cfg.method, cfg.repeats, cfg.warmup);
  bench::BenchOptions options;
  options.seed = cfg.seed.value_or(0);
  options.limits = {cfg.max_dim, cfg.force};
  const auto rows = bench::run_bench(specs, options);
  out << bench::format_bench_csv(rows);
  if (!cfg.out_path.empty()) bench::write_bench_csv(rows, cfg.out_path);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Exact singular values and operator-norm projection of circular convolutional layers",
               "conv-spectra"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", cfg.threads, "Worker threads (default: CONV_SPECTRA_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", cfg.json, "Print the report as a single JSON object");

  auto add_kernel = [&](CLI::App* sub) {
    sub->add_option("--kernel", cfg.kernel_path, "Kernel .npy file, layout [h, w, out, in]")->required();
    sub->add_option("--input-shape", cfg.input_shape, "Feature map height and width")->expected(2)->required();
  };

  auto* spectrum = app.add_subcommand("spectrum", "Singular values of the layer");
  add_kernel(spectrum);
  spectrum->add_option("--top", cfg.top, "Print the N largest singular values");
  spectrum->add_option("--out", cfg.out_path, "Write the spectrum as CSV");
  spectrum->add_option("--mode", cfg.mode, "CSV mode")->check(CLI::IsMember({"values", "ratios", "normalized"}));

  auto* clip = app.add_subcommand("clip", "Project the layer onto an operator-norm ball");
  add_kernel(clip);
  clip->add_option("--bound", cfg.bound, "Operator-norm bound")->required();
  clip->add_option("--rounds", cfg.rounds, "Clip/restrict alternations")->check(CLI::PositiveNumber);
  clip->add_option("--out", cfg.out_path, "Output kernel .npy")->required();

  auto* reshaped = app.add_subcommand("clip-reshaped", "Clip singular values of the reshaped kernel matrix");
  add_kernel(reshaped);
  reshaped->add_option("--bound", cfg.bound, "Bound on the reshaped matrix norm")->required();
  reshaped->add_option("--out", cfg.out_path, "Output kernel .npy")->required();

  auto* check = app.add_subcommand("oracle-check", "Compare against SVD of the dense layer matrix");
  add_kernel(check);
  check->add_option("--max-dim", cfg.max_dim, "Largest dense matrix dimension allowed");
  check->add_flag("--force", cfg.force, "Ignore the dense size cap");

  auto* generate = app.add_subcommand("generate", "Write a seeded standard-normal kernel");
  generate->add_option("--shape", cfg.kernel_shape, "k_h k_w m_out m_in")->expected(4)->required();
  generate->add_option("--seed", cfg.seed, "RNG seed (default: time-derived, printed)");
  generate->add_option("--out", cfg.out_path, "Output kernel .npy")->required();

  auto* bench = app.add_subcommand("bench", "Time exact and full-matrix spectrum computation");
  bench->add_option("--grid", cfg.grid, "Grid such as n=16,m=4:8:16:32,k=3")->required();
  bench->add_option("--method", cfg.method, "exact, full or both")->check(CLI::IsMember({"exact", "full", "both"}));
  bench->add_option("--repeats", cfg.repeats, "Timed repetitions (>= 3)");
  bench->add_option("--warmup", cfg.warmup, "Untimed warmup runs (>= 1)");
  bench->add_option("--seed", cfg.seed, "Kernel seed");
  bench->add_option("--out", cfg.out_path, "Write timings CSV");
  bench->add_option("--max-dim", cfg.max_dim, "Largest dense matrix dimension allowed");
  bench->add_flag("--force", cfg.force, "Run full-matrix cells above the size cap");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  if (cfg.threads) set_thread_count(*cfg.threads);
  try {
    if (*spectrum) return cmd_spectrum(cfg, out);
    if (*clip) return cmd_clip(cfg, out);
    if (*reshaped) return cmd_clip_reshaped(cfg, out);
    if (*check) return cmd_oracle_check(cfg, out);
    if (*generate) return cmd_generate(cfg, out);
    if (*bench) return cmd_bench(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kValidationError;
}

}  // namespace convspectra::cli
