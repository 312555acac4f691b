#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hopfrc/checkpoint.hpp"
#include "hopfrc/config.hpp"
#include "hopfrc/error.hpp"
#include "hopfrc/experiments.hpp"
#include "hopfrc/pipeline.hpp"
#include "hopfrc/report.hpp"
#include "hopfrc/suites.hpp"
#include "hopfrc/wav.hpp"

using namespace hopfrc;
using namespace hopfrc::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hopfrc_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind{};
}

std::string text_metric(const Report& r, const std::string& key) {
  for (const auto& [k, v] : r.metrics) {
    if (k == key) return std::get<std::string>(v);
  }
  return {};
}

// A manifest of `n` WAV tones, all in class "only".
fs::path single_class_manifest(const fs::path& dir, int n) {
  std::ofstream csv(dir / "m.csv");
  csv << "path,label\n";
  for (int i = 0; i < n; ++i) {
    audio::SynthSpec s;
    s.frequency = 300 + 50 * i;
    const auto bytes = audio::write_wav16(audio::synthesize(s, 8000));
    const auto name = "t" + std::to_string(i) + ".wav";
    std::ofstream(dir / name, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    csv << name << ",only\n";
  }
  return dir / "m.csv";
}

}  // namespace

// -------------------------------------------------------------- config

TEST(Config, ParsesNestedSections) {
  const auto cfg = parse_config(R"({
    "kind": "noise-sweep", "seed": 42,
    "reservoir": {"mu": 2.5, "omega0_hz": 500, "substeps": 2, "n_virtual": 50},
    "activation": {"apply_atanh": false},
    "dataset": {"suite": "B", "clips_per_class": 7, "background_snr_db": null},
    "train": {"epochs": 3, "batch_size": 2},
    "snr_db": [10, 5]
  })");
  EXPECT_EQ(cfg.kind, ExperimentKind::kNoiseSweep);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.reservoir.hopf.mu, 2.5);
  EXPECT_NEAR(cfg.reservoir.hopf.omega0, 2 * 3.141592653589793 * 500, 1e-9);
  EXPECT_EQ(cfg.reservoir.integrator.substeps, 2);
  EXPECT_EQ(cfg.reservoir.integrator.n_virtual, 50);
  EXPECT_FALSE(cfg.activation.apply_atanh);
  EXPECT_EQ(cfg.dataset.suite, "B");
  EXPECT_EQ(cfg.dataset.clips_per_class, 7u);
  EXPECT_FALSE(cfg.dataset.background_snr_db.has_value());
  EXPECT_EQ(cfg.train.epochs, 3u);
  EXPECT_EQ(cfg.snr_db, (std::vector<double>{10, 5}));
  // Untouched fields keep their defaults.
  EXPECT_EQ(cfg.reservoir.hopf.omega_f, reservoir::HopfParams{}.omega_f);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(kind_of([] { parse_config(R"({"seeed": 1})"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse_config(R"({"reservoir": {"muu": 1}})"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse_config(R"({"kind": "dance"})"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse_config(R"({"seed": "one"})"); }), ErrorKind::kParse);
}

TEST(Config, SyntaxErrorCarriesOffset) {
  try {
    parse_config("{\"seed\": 1,, }");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GE(e.offset(), 10u);
    EXPECT_LE(e.offset(), 13u);
  }
}

TEST(Config, RelativePathsResolvedAgainstConfigDir) {
  const auto dir = scratch("cfgpath");
  std::ofstream(dir / "m.csv") << "path,label\n";
  std::ofstream(dir / "c.json") << R"({"kind": "featurize", "dataset": {"manifest": "m.csv"}})";
  const auto cfg = load_config(dir / "c.json");
  ASSERT_TRUE(cfg.dataset.manifest);
  EXPECT_EQ(*cfg.dataset.manifest, dir / "m.csv");
  EXPECT_EQ(kind_of([] { load_config("/nonexistent/c.json"); }), ErrorKind::kIo);
}

TEST(Config, ValidationCatchesMissingManifest) {
  auto cfg = parse_config(R"({"dataset": {"manifest": "/nonexistent/m.csv"}})");
  EXPECT_EQ(kind_of([&] { cfg.validate(); }), ErrorKind::kContract);
  cfg = parse_config(R"({"train": {"epochs": 0}})");
  EXPECT_EQ(kind_of([&] { cfg.validate(); }), ErrorKind::kContract);
}

TEST(Config, HashCoversResultsOnly) {
  ExperimentConfig a;
  ExperimentConfig b = a;
  b.out = "elsewhere";
  b.single_thread = !a.single_thread;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.seed = a.seed + 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  b = a;
  b.reservoir.hopf.mu *= 2;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(canonical_json(a), canonical_json(parse_config(canonical_json(a))));
}

// -------------------------------------------------------------- report

TEST(Report, MetricsFormat) {
  Report r;
  r.kind = "classify";
  r.config_hash = "0123456789abcdef";
  r.seed = 7;
  r.set("accuracy", 0.95);
  r.set("recall", std::vector<double>{1, 0.5});
  r.set("note", std::string("x"));
  r.set("accuracy", 0.9);
  r.warnings.push_back("careful");
  EXPECT_EQ(format_metrics(r),
            "kind = classify\nconfig_hash = 0123456789abcdef\nseed = 7\naccuracy = 0.9\nrecall = [1, 0.5]\nnote = x\n"
            "warning = careful\n");
  EXPECT_EQ(r.number("accuracy"), 0.9);
  EXPECT_THROW(r.number("recall"), Error);
  EXPECT_THROW(r.number("missing"), Error);
}

TEST(Report, CsvQuoting) {
  Table t{"t", {"a", "b"}, {{"x,y", "say \"hi\""}}};
  EXPECT_EQ(format_csv(t), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST(Report, TenClassConfusionCsv) {
  readout::ConfusionMatrix cm(10);
  for (int c = 0; c < 10; ++c) cm.add(c, (c + 1) % 10);
  const auto csv = confusion_csv(cm, {});
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 11);
}

TEST(Report, MapFileNames) {
  EXPECT_EQ(map_file_name("A-tone-007"), "A-tone-007.pgm");
  EXPECT_EQ(map_file_name("dir/a b@1"), "dir_a_b_1.pgm");
  EXPECT_EQ(map_file_name(""), "map.pgm");
}

TEST(Report, EmitCreatesDirectoryAndFiles) {
  const auto dir = scratch("emit") / "nested" / "out";
  Report r;
  r.kind = "classify";
  r.config_json = "{}";
  r.set("accuracy", 1.0);
  r.confusion = readout::ConfusionMatrix(2);
  r.confusion->add(0, 0);
  r.class_names = {"a", "b"};
  r.loss_history = {0.7, 0.3};
  features::FeatureMap m;
  m.grid = Grid(200, 100, 0.5);
  m.source_id = "x";
  r.maps.push_back(m);
  report_emit(r, dir);
  for (const char* f : {"metrics.txt", "config.json", "confusion.csv", "class_metrics.csv", "loss_history.csv",
                        "maps/x.pgm", "timing.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(slurp(dir / "metrics.txt"), format_metrics(r));
}

TEST(Report, UnwritableDirectoryIsIoError) {
  const auto dir = scratch("unwritable");
  std::ofstream(dir / "file") << "x";
  Report r;
  EXPECT_EQ(kind_of([&] { report_emit(r, dir / "file" / "sub"); }), ErrorKind::kIo);
}

// ------------------------------------------------------------ pipeline

TEST(Pipeline, ParallelMapIndependentOfThreads) {
  auto sq = [](std::size_t i) { return static_cast<double>(i * i); };
  EXPECT_EQ(parallel_map<double>(37, 1, sq), parallel_map<double>(37, 4, sq));
  try {
    parallel_map<int>(10, 3, [](std::size_t i) -> int {
      if (i >= 4) fail(ErrorKind::kParse, "item " + std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "item 4");
  }
}

TEST(Pipeline, FitLengthAndWindows) {
  audio::AudioClip c;
  c.rate = 4000;
  c.samples.assign(6000, 0.25);
  EXPECT_EQ(fit_length(c).samples.size(), 4000u);
  c.samples.assign(1000, 0.25);
  const auto padded = fit_length(c);
  EXPECT_EQ(padded.samples.size(), 4000u);
  EXPECT_EQ(padded.samples[3999], 0.0);

  const FeatureSettings s;
  audio::SynthSpec spec;
  spec.duration = 2.5;
  const auto maps = hopf_maps(audio::synthesize(spec, 16000), s);
  ASSERT_EQ(maps.size(), 2u);
  for (const auto& m : maps) {
    EXPECT_EQ(m.grid.rows(), 200u);
    EXPECT_EQ(m.grid.cols(), 100u);
  }
  spec.duration = 0.4;
  EXPECT_EQ(hopf_maps(audio::synthesize(spec, 16000), s).size(), 1u);
}

TEST(Pipeline, IdenticalClipsGiveZeroDistance) {
  const FeatureSettings s;
  const auto clip = audio::synthesize(siren_variant(3), 16000);
  EXPECT_EQ(features::euclidean_distance(hopf_map(clip, s), hopf_map(clip, s)), 0.0);
  EXPECT_EQ(features::euclidean_distance(mel_map(clip, s), mel_map(clip, s)), 0.0);
}

// ---------------------------------------------------------- experiments

TEST(Experiments, FeaturizeTenClassesOneClipEach) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kFeaturize;
  cfg.dataset.suite = "ten";
  cfg.dataset.clips_per_class = 1;
  const auto dir = scratch("featurize");
  const auto r = run_experiment(cfg);
  report_emit(r, dir / "a");
  EXPECT_EQ(r.number("map_count"), 10.0);
  std::size_t pgms = 0;
  for (const auto& e : fs::directory_iterator(dir / "a" / "maps")) {
    ++pgms;
    const auto bytes = slurp(e.path());
    EXPECT_EQ(bytes.rfind("P5 100 200 255\n", 0), 0u);
    EXPECT_EQ(bytes.size(), 15u + 20000u);
  }
  EXPECT_EQ(pgms, 10u);

  cfg.single_thread = true;
  report_emit(run_experiment(cfg), dir / "b");
  for (const auto& e : fs::directory_iterator(dir / "a" / "maps")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / "maps" / e.path().filename()));
  }
  EXPECT_EQ(slurp(dir / "a" / "metrics.txt"), slurp(dir / "b" / "metrics.txt"));
  EXPECT_EQ(slurp(dir / "a" / "index.csv"), slurp(dir / "b" / "index.csv"));
}

TEST(Experiments, FeaturizeEmptyManifest) {
  const auto dir = scratch("empty");
  std::ofstream(dir / "m.csv") << "path,label\n";
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kFeaturize;
  cfg.dataset.manifest = dir / "m.csv";
  const auto r = run_experiment(cfg);
  EXPECT_EQ(r.number("map_count"), 0.0);
  ASSERT_EQ(r.tables.size(), 1u);
  EXPECT_TRUE(r.tables[0].rows.empty());
}

TEST(Experiments, CompareMelReportsPairs) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kCompareMel;
  const auto r = run_experiment(cfg);
  const auto& t = r.tables.at(0);
  // self row, 3 + 2 + 1 within pairs, one cross pair
  ASSERT_EQ(t.rows.size(), 8u);
  EXPECT_EQ(t.rows[0][1], "0");
  EXPECT_EQ(t.rows[0][2], "0");
  EXPECT_EQ(r.array("hopf_within_normalized").size(), 6u);
  for (double d : r.array("hopf_within_normalized")) EXPECT_GT(d, 0.0);
  EXPECT_GT(r.number("mel_cross_normalized"), r.number("mel_within_mean_normalized"));
  EXPECT_GT(r.number("hopf_cross_normalized"), r.number("hopf_within_mean_normalized"));
}

// Does not hold for the synthetic suite: Hopf within-class spread is about
// 0.066 against 0.046 for Mel. Kept disabled so the gap stays visible.
TEST(Experiments, DISABLED_HopfWithinClassTighterThanMel) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kCompareMel;
  const auto r = run_experiment(cfg);
  const auto& h = r.array("hopf_within_normalized");
  const auto& m = r.array("mel_within_normalized");
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_LT(h[i], m[i]) << i;
}

TEST(Experiments, NoiseSweepOrdering) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kNoiseSweep;
  const auto r = run_experiment(cfg);
  const auto& h = r.array("hopf_normalized");
  const auto& m = r.array("mel_normalized");
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(r.array("snr_db"), (std::vector<double>{40, 30, 20}));
  // Degradation grows as the SNR falls.
  for (std::size_t i = 1; i < h.size(); ++i) {
    EXPECT_GE(h[i], h[i - 1]);
    EXPECT_GE(m[i], m[i - 1]);
  }
  EXPECT_LT(h.back(), m.back());
  const auto& table = r.tables.at(0);
  EXPECT_EQ(table.rows[0][4], "0");
  EXPECT_EQ(table.rows[0][5], "0");
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.array("achieved_snr_db")[i], cfg.snr_db[i], 0.5);
}

TEST(Experiments, MixedSignalOrdering) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kMixedSignal;
  const auto r = run_experiment(cfg);
  EXPECT_EQ(r.number("reference_self_distance"), 0.0);
  EXPECT_EQ(r.array("window_distance").size(), 8u);
  EXPECT_LT(r.number("late_mean_distance"), r.number("early_mean_distance"));
  EXPECT_LT(r.number("late_mean_distance_double_gain"), r.number("late_mean_distance"));
}

TEST(Experiments, ClassifySingleClassWarns) {
  const auto dir = scratch("single");
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kClassify;
  cfg.dataset.manifest = single_class_manifest(dir, 5);
  cfg.train.epochs = 1;
  const auto r = run_experiment(cfg);
  EXPECT_EQ(r.number("accuracy"), 1.0);
  EXPECT_EQ(r.number("test_count"), 1.0);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("degenerate"), std::string::npos);
}

TEST(Experiments, RidgeClassifyConfusionMatchesSplit) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kClassify;
  cfg.readout = ReadoutKind::kRidge;
  cfg.dataset.clips_per_class = 5;
  const auto r = run_experiment(cfg);
  ASSERT_TRUE(r.confusion);
  EXPECT_EQ(r.confusion->total(), 4u);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(r.confusion->row_sum(c), 1u);
  EXPECT_EQ(r.number("train_count"), 16.0);
  EXPECT_FALSE(r.model.has_value());
}

TEST(Experiments, ReconfigureFreezesConvBlocks) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kReconfigure;
  cfg.task.clips_per_class = 5;
  cfg.task_epochs = 1;
  const auto base = readout::build_default_model(4, 3);
  const auto r = run_reconfigure(cfg, base);
  EXPECT_EQ(r.number("trainable_params"), 36948.0);
  EXPECT_EQ(r.number("closed_form_head_params"), 36948.0);
  EXPECT_EQ(text_metric(r, "conv_params_unchanged"), "true");
  ASSERT_TRUE(r.model);
  for (std::size_t i = 0; i < r.model->flatten_index(); ++i) {
    const auto a = r.model->layer(i).params();
    const auto b = base.layer(i).params();
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].value, b[k].value);
  }
}

TEST(Experiments, ReconfigureFromCheckpointFile) {
  const auto dir = scratch("reconf");
  readout::save_checkpoint(readout::build_default_model(4, 5), dir / "base.ckpt");
  auto cfg = parse_config(R"({"kind": "reconfigure", "base_checkpoint": "base.ckpt", "task_epochs": 1,
                              "task": {"clips_per_class": 5}})",
                          dir);
  const auto r = run_experiment(cfg);
  EXPECT_EQ(r.number("trainable_params"), r.number("closed_form_head_params"));
  EXPECT_FALSE(r.has("base_accuracy"));
}

TEST(Experiments, SameSeedSameMetrics) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kClassify;
  cfg.dataset.clips_per_class = 5;
  cfg.train.epochs = 2;
  cfg.single_thread = true;
  EXPECT_EQ(format_metrics(run_experiment(cfg)), format_metrics(run_experiment(cfg)));
}

TEST(Experiments, InvalidConfigIsContractError) {
  ExperimentConfig cfg;
  cfg.dataset.suite = "Z";
  cfg.kind = ExperimentKind::kFeaturize;
  EXPECT_EQ(kind_of([&] { run_experiment(cfg); }), ErrorKind::kContract);
}
