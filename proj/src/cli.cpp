#include "stablebench/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "stablebench/analysis.hpp"
#include "stablebench/bench.hpp"
#include "stablebench/model.hpp"
#include "stablebench/report.hpp"

namespace stablebench::cli {

namespace {

namespace fs = std::filesystem;

// Carries an exit code through the shared error printer.
struct Failure {
  int code;
  std::string message;
};

struct SweepFlags {
  std::string min_buffer = "4k";
  std::string max_buffer = "16m";
  std::string file_size = "16m";
  int runs = 30;
  std::string label;
  std::string out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--min-buffer", min_buffer, "Smallest buffer (k/m suffixes)")
        ->capture_default_str();
    cmd->add_option("--max-buffer", max_buffer, "Largest buffer")->capture_default_str();
    cmd->add_option("--file-size", file_size, "Bytes written per pass")->capture_default_str();
    cmd->add_option("--runs", runs, "Repetitions of the whole sweep")->capture_default_str();
    cmd->add_option("--label", label, "Backend label recorded in every run");
    cmd->add_option("--out", out, "Archive to write (.sbarch)")->required();
  }

  SweepConfig config(const std::string& target) const {
    SweepConfig c;
    c.min_buffer = BufferSize(parse_size(min_buffer));
    c.max_buffer = BufferSize(parse_size(max_buffer));
    c.file_size = parse_size(file_size);
    c.repetitions = runs;
    c.target_path = target;
    c.validate();
    return c;
  }

  void check_output() const {
    const fs::path parent = fs::absolute(fs::path(out)).parent_path();
    if (!fs::is_directory(parent)) {
      throw ConfigError("output directory '" + parent.string() + "' does not exist");
    }
  }
};

int run_and_archive(const SweepConfig& config, DeviceBackend& backend, const std::string& out_path,
                    std::ostream& err) {
  const auto sizes = config.swept_sizes();
  const auto outcome = run_sweep(config, backend, [&](int rep, int reps, BufferSize size) {
    err << "run " << rep << "/" << reps << " buffer " << size.label() << '\n';
  });
  if (!outcome.ok()) {
    throw Failure{kExitFailure, "benchmark failed after " + std::to_string(outcome.runs.size()) +
                                    " passes: " + outcome.failure->message};
  }
  const auto manifest = write_archive(outcome.runs, config, out_path);
  err << "archived " << manifest.run_count << " runs (" << sizes.size() << " sizes x "
      << config.repetitions << " repetitions) to " << out_path << '\n';
  return kExitOk;
}

LoadedArchive load(const std::string& path) {
  try {
    return load_archive(path);
  } catch (const Error& e) {
    throw Failure{kExitFailure, e.what()};
  }
}

std::string kb_label(BufferSize b) { return format_number(b.kb()) + " kB"; }

void print_curve(const Curve& curve, std::ostream& out) {
  out << "backend: " << curve.backend_id << '\n';
  out << std::left << std::setw(12) << "buffer_kb" << std::setw(28) << "throughput_kbps"
      << std::setw(28) << "latency_us" << "ratio\n";
  for (const auto& p : curve.points) {
    const auto pm = [](const Stats& s) {
      return format_number(s.mean) + " +- " + (s.stddev ? format_number(*s.stddev) : "n/a");
    };
    out << std::setw(12) << format_number(p.buffer.kb()) << std::setw(28) << pm(p.throughput)
        << std::setw(28) << pm(p.latency) << format_number(p.ratio) << '\n';
  }
}

void print_range(std::ostream& out, const char* name, const Curve& c, const PointRange& r) {
  out << name << ": ";
  if (r.empty()) {
    out << "(none)\n";
  } else {
    out << kb_label(c.points[r.first].buffer) << " - " << kb_label(c.points[r.end() - 1].buffer)
        << '\n';
  }
}

void print_recommendation(const Recommendation& r, std::ostream& out) {
  out << "recommended buffer: " << kb_label(r.buffer) << " (" << r.buffer.bytes() << " bytes)\n";
  out << "rule: " << to_string(r.rule) << '\n';
  out << "feasible: " << (r.feasible ? "yes" : "no (nearest miss)") << '\n';
  out << "throughput_kbps: " << format_number(r.achieved_throughput) << '\n';
  out << "latency_us: " << format_number(r.achieved_latency) << '\n';
}

template <typename Fn>
void write_file(const std::string& path, Fn&& emit) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Failure{kExitFailure, "cannot open '" + path + "' for writing"};
  emit(f);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synchronous sequential write benchmark and buffer-size advisor", "stablebench"};
  app.require_subcommand(1);

  // bench
  SweepFlags bench_flags;
  std::string bench_path;
  auto* bench = app.add_subcommand("bench", "Run the sweep on a real directory and archive it");
  bench->add_option("--path", bench_path, "Directory on the device under test")->required();
  bench_flags.attach(bench);

  // synth
  SweepFlags synth_flags;
  SyntheticDeviceSpec synth_spec;
  auto* synth = app.add_subcommand("synth", "Run the sweep against the synthetic device model");
  synth->add_option("--l0", synth_spec.l0_us, "Fixed per-write latency (us)")->required();
  synth->add_option("--bandwidth", synth_spec.bandwidth, "Transfer rate (bytes per us)")
      ->required();
  synth->add_option("--noise", synth_spec.noise_stddev_us, "Gaussian latency noise stddev (us)")
      ->capture_default_str();
  synth->add_option("--seed", synth_spec.seed, "Noise seed")->capture_default_str();
  synth_flags.attach(synth);

  // analyze
  std::string analyze_in, analyze_csv, analyze_json;
  bool analyze_fit = false;
  double latency_band = kDefaultLatencyBand;
  double throughput_band = kDefaultThroughputBand;
  auto* analyze = app.add_subcommand("analyze", "Aggregate an archive into curves and phases");
  analyze->add_option("--in", analyze_in, "Archive to read")->required();
  analyze->add_option("--csv", analyze_csv, "Write the curve as CSV");
  analyze->add_option("--json", analyze_json, "Write the curve and analysis as JSON");
  analyze->add_flag("--fit", analyze_fit, "Fit the affine latency model");
  analyze->add_option("--latency-band", latency_band, "Phase 1 latency band")
      ->capture_default_str();
  analyze->add_option("--throughput-band", throughput_band, "Phase 3 throughput band")
      ->capture_default_str();

  // recommend
  std::string recommend_in;
  std::optional<double> min_throughput, max_latency;
  auto* recommend = app.add_subcommand("recommend", "Pick a buffer size from an archive");
  recommend->add_option("--in", recommend_in, "Archive to read")->required();
  recommend->add_option("--min-throughput", min_throughput, "Required throughput (kB/s)");
  recommend->add_option("--max-latency", max_latency, "Latency ceiling (us)");

  // compare
  std::string compare_a, compare_b;
  double threshold = kDefaultSignificance;
  bool welch = false;
  auto* compare = app.add_subcommand("compare", "Per-size t-test between two archives");
  compare->add_option("--a", compare_a, "First archive")->required();
  compare->add_option("--b", compare_b, "Second archive")->required();
  compare->add_option("--threshold", threshold, "Significance threshold")->capture_default_str();
  compare->add_flag("--welch", welch, "Use Welch's unequal-variance test");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("stablebench");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*bench) {
      const SweepConfig config = bench_flags.config(bench_path);
      bench_flags.check_output();
      FileBackend backend({bench_path, bench_flags.label, config.sync_per_write,
                           config.bypass_cache});
      return run_and_archive(config, backend, bench_flags.out, err);
    }

    if (*synth) {
      SweepConfig config = synth_flags.config("synthetic");
      config.seed = synth_spec.seed;
      synth_spec.validate();
      synth_flags.check_output();
      SyntheticBackend backend(synth_spec, synth_flags.label);
      return run_and_archive(config, backend, synth_flags.out, err);
    }

    if (*analyze) {
      if (!(latency_band > 0.0) || !(throughput_band > 0.0)) {
        throw ConfigError("phase bands must be positive");
      }
      const auto archive = load(analyze_in);
      const Curve curve = aggregate_curve(archive.runs);
      print_curve(curve, out);

      AnalysisBundle bundle;
      const auto ratios = ratio_curve(curve);
      out << "ratio argmax: " << kb_label(ratios.points[ratios.argmax].buffer) << '\n';
      bundle.recommendation = recommend_buffer(curve, std::nullopt, std::nullopt);
      if (curve.points.size() >= 3) {
        bundle.phases = detect_phases(curve, latency_band, throughput_band);
        print_range(out, "phase 1 (latency flat)", curve, bundle.phases->flat_latency);
        print_range(out, "phase 2 (both rising)", curve, bundle.phases->rising);
        print_range(out, "phase 3 (throughput saturated)", curve, bundle.phases->saturated);
      } else {
        err << "warning: phase detection skipped (needs at least 3 buffer sizes)\n";
      }
      if (analyze_fit) {
        try {
          bundle.model = fit_latency_model(curve);
          out << "model: l0_us=" << format_number(bundle.model->l0_us)
              << " bandwidth_bytes_per_us=" << format_number(bundle.model->bandwidth)
              << " residual_us=" << format_number(bundle.model->fit_residual_us)
              << " optimal_buffer_bytes=" << format_number(optimal_ratio_buffer(*bundle.model))
              << '\n';
        } catch (const ModelError& e) {
          err << "warning: model fit rejected: " << e.what() << '\n';
        }
      }
      if (!analyze_csv.empty()) {
        write_file(analyze_csv, [&](std::ostream& f) { emit_csv(curve, f); });
      }
      if (!analyze_json.empty()) {
        write_file(analyze_json, [&](std::ostream& f) { emit_json({curve}, bundle, f); });
      }
      return kExitOk;
    }

    if (*recommend) {
      const auto archive = load(recommend_in);
      const Curve curve = aggregate_curve(archive.runs);
      const auto rec = recommend_buffer(curve, min_throughput, max_latency);
      print_recommendation(rec, out);
      if (!rec.feasible) {
        err << "error: no swept buffer satisfies the constraint; nearest miss is "
            << kb_label(rec.buffer) << '\n';
        return kExitInfeasible;
      }
      return kExitOk;
    }

    if (*compare) {
      if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("threshold must lie in (0, 1)");
      }
      const Curve a = aggregate_curve(load(compare_a).runs);
      const Curve b = aggregate_curve(load(compare_b).runs);
      const auto variant = welch ? TTestVariant::welch : TTestVariant::pooled;
      const auto rows = compare_curves(a, b, threshold, variant);
      out << "a: " << a.backend_id << "\nb: " << b.backend_id << "\nvariant: "
          << to_string(variant) << " threshold: " << format_number(threshold) << '\n';
      out << std::left << std::setw(12) << "buffer_kb" << std::setw(16) << "t" << std::setw(10)
          << "df" << std::setw(24) << "p" << "significant\n";
      for (const auto& row : rows) {
        const auto& r = row.result;
        const std::string t = std::isfinite(r.t) ? format_number(r.t) : (r.t > 0 ? "inf" : "-inf");
        out << std::setw(12) << format_number(row.buffer.kb()) << std::setw(16) << t
            << std::setw(10) << format_number(r.df) << std::setw(24)
            << format_number(r.p_two_sided) << (r.significant ? "yes" : "no") << '\n';
      }
      return kExitOk;
    }
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace stablebench::cli
