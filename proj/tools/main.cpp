// hopfrc: configuration-driven experiment runner.
//
//   hopfrc <featurize|compare-mel|noise-sweep|classify|reconfigure|mixed-signal>
//          [--config FILE] [--seed N] [--out DIR] [--single-thread]
//
// Exit status: 0 on success, 1 for bad command-line usage, otherwise the
// error category (see hopfrc/error.hpp).

#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hopfrc/config.hpp"
#include "hopfrc/error.hpp"
#include "hopfrc/experiments.hpp"

namespace {

constexpr int kUsageExit = 1;
constexpr int kInternalExit = 9;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool single_thread = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "global seed (overrides the config)");
  sub->add_option("--out", o.out, "output directory (overrides the config)");
  sub->add_flag("--single-thread", o.single_thread, "featurize on one thread");
}

void print_summary(const hopfrc::harness::Report& r, const std::filesystem::path& out) {
  std::printf("%s: wrote %s (config %s, %.1f s)\n", r.kind.c_str(), out.string().c_str(), r.config_hash.c_str(),
              r.wall_clock_s);
  for (const char* key : {"accuracy", "trainable_params", "clip_count", "hopf_within_mean_normalized",
                          "mel_within_mean_normalized", "late_mean_distance", "early_mean_distance"}) {
    if (r.has(key)) std::printf("  %s = %.6g\n", key, r.number(key));
  }
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hopfrc;
  CLI::App app{"Hopf-oscillator reservoir computing experiments"};
  app.require_subcommand(1);
  Options opts;
  for (auto kind : {harness::ExperimentKind::kFeaturize, harness::ExperimentKind::kCompareMel,
                    harness::ExperimentKind::kNoiseSweep, harness::ExperimentKind::kClassify,
                    harness::ExperimentKind::kReconfigure, harness::ExperimentKind::kMixedSignal}) {
    add_common(app.add_subcommand(std::string(harness::to_string(kind))), opts);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    harness::ExperimentConfig cfg;
    if (!opts.config.empty()) cfg = harness::load_config(opts.config);
    cfg.kind = harness::parse_experiment_kind(app.get_subcommands().front()->get_name());
    if (opts.seed) cfg.seed = *opts.seed;
    if (!opts.out.empty()) cfg.out = opts.out;
    if (opts.single_thread) cfg.single_thread = true;

    const auto report = harness::run_experiment(cfg);
    harness::report_emit(report, cfg.out);
    print_summary(report, cfg.out);
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "hopfrc: %s error: %s\n", std::string(to_string(e.kind())).c_str(), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hopfrc: internal error: %s\n", e.what());
    return kInternalExit;
  }
}
