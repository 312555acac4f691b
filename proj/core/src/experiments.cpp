#include "hopfrc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

#include "hopfrc/checkpoint.hpp"
#include "hopfrc/error.hpp"
#include "hopfrc/pipeline.hpp"
#include "hopfrc/ridge.hpp"
#include "hopfrc/rng.hpp"
#include "hopfrc/suites.hpp"

namespace hopfrc::harness {
namespace {

using features::FeatureMap;

// Independent streams derived from the global seed.
enum class Stream : std::uint64_t { kDataset = 1, kSplit, kModelInit, kShuffle, kNoise, kTaskDataset, kTaskSplit, kHead };

std::uint64_t derive(std::uint64_t seed, Stream s) {
  std::uint64_t state = seed ^ (static_cast<std::uint64_t>(s) * 0xD1B54A32D192ED03ULL);
  return next_u64(state);
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Report begin(const ExperimentConfig& cfg, ExperimentKind kind) {
  Report r;
  r.kind = std::string(to_string(kind));
  ExperimentConfig echo = cfg;
  echo.kind = kind;
  r.config_json = canonical_json(echo);
  r.config_hash = config_hash(echo);
  r.seed = cfg.seed;
  return r;
}

FeatureSettings settings_of(const ExperimentConfig& cfg) { return {cfg.reservoir, cfg.activation, cfg.mel}; }

audio::DatasetManifest load_dataset(const DatasetSource& src, std::uint64_t seed) {
  if (src.manifest) {
    auto m = audio::read_manifest(*src.manifest);
    m.seed = seed;
    return m;
  }
  return build_suite(src.suite, src.clips_per_class, seed, src.background_snr_db);
}

bool has_preassigned_split(const audio::DatasetManifest& m) {
  if (m.entries.empty()) return false;
  for (const auto& e : m.entries) {
    if (e.split == audio::Split::kUnassigned) return false;
  }
  return true;
}

audio::DatasetManifest assign_split(const audio::DatasetManifest& m, double fraction, std::uint64_t seed) {
  if (has_preassigned_split(m)) return m;
  return audio::split_dataset(m, fraction, seed);
}

struct SplitSamples {
  std::vector<readout::Sample> train, test;
  std::vector<std::string> test_ids;
  std::vector<Grid> train_grids, test_grids;
};

SplitSamples to_samples(const LabeledMaps& maps) {
  SplitSamples s;
  for (std::size_t i = 0; i < maps.maps.size(); ++i) {
    readout::Sample smp{readout::to_tensor(maps.maps[i].grid), maps.labels[i]};
    if (maps.splits[i] == audio::Split::kTrain) {
      s.train.push_back(std::move(smp));
      s.train_grids.push_back(maps.maps[i].grid);
    } else {
      s.test.push_back(std::move(smp));
      s.test_grids.push_back(maps.maps[i].grid);
      s.test_ids.push_back(maps.maps[i].source_id);
    }
  }
  return s;
}

readout::Shape map_shape(const ExperimentConfig& cfg) {
  features::MapLayout layout;
  return {layout.time_rows, static_cast<std::size_t>(cfg.reservoir.integrator.n_virtual), 1};
}

void add_evaluation(Report& r, const readout::Evaluation& ev, const std::vector<std::string>& class_names,
                    const std::vector<std::string>& test_ids, const std::vector<readout::Sample>& test) {
  r.set("accuracy", ev.accuracy);
  r.set("test_count", static_cast<double>(test.size()));
  std::vector<double> precision, recall;
  for (std::size_t c = 0; c < ev.confusion.n_classes(); ++c) {
    precision.push_back(ev.confusion.precision(c));
    recall.push_back(ev.confusion.recall(c));
  }
  r.set("precision", precision);
  r.set("recall", recall);
  r.confusion = ev.confusion;
  r.class_names = class_names;
  Table preds{"predictions", {"id", "true", "predicted"}, {}};
  for (std::size_t i = 0; i < test.size(); ++i) {
    preds.rows.push_back({test_ids[i], class_names[static_cast<std::size_t>(test[i].label)],
                          class_names[static_cast<std::size_t>(ev.predictions[i])]});
  }
  r.tables.push_back(std::move(preds));
}

readout::TrainConfig shuffle_seeded(readout::TrainConfig t, std::uint64_t seed) {
  t.seed = seed;
  return t;
}

struct Trained {
  readout::ReadoutModel model;
  readout::TrainResult history;
  readout::Evaluation evaluation;
  SplitSamples samples;
  audio::DatasetManifest split;
};

// Featurize, split and train the CNN readout on one dataset.
Trained train_on(const ExperimentConfig& cfg, const DatasetSource& src, Stream data_stream, Stream split_stream,
                 std::size_t epochs) {
  const auto settings = settings_of(cfg);
  const auto manifest = load_dataset(src, derive(cfg.seed, data_stream));
  require(!manifest.entries.empty(), "training dataset is empty");
  Trained t;
  t.split = assign_split(manifest, src.train_fraction, derive(cfg.seed, split_stream));
  const auto maps = featurize_manifest(t.split, settings, src.synth_rate, worker_count(cfg.single_thread));
  t.samples = to_samples(maps);
  t.model = readout::build_default_model(t.split.class_names.size(), derive(cfg.seed, Stream::kModelInit),
                                         cfg.architecture, map_shape(cfg));
  auto tc = shuffle_seeded(cfg.train, derive(cfg.seed, Stream::kShuffle));
  tc.epochs = epochs;
  t.history = readout::train(t.model, t.samples.train, tc);
  t.evaluation = readout::evaluate(t.model, t.samples.test);
  return t;
}

void add_distance_row(Table& t, const std::string& pair, const FeatureMap& ha, const FeatureMap& hb,
                      const FeatureMap& ma, const FeatureMap& mb) {
  t.rows.push_back({pair, fmt(features::euclidean_distance(ha, hb)), fmt(features::euclidean_distance(ma, mb)),
                    fmt(features::normalized_distance(ha, hb)), fmt(features::normalized_distance(ma, mb))});
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

Report run_featurize(const ExperimentConfig& cfg) {
  Report r = begin(cfg, ExperimentKind::kFeaturize);
  const auto manifest = load_dataset(cfg.dataset, derive(cfg.seed, Stream::kDataset));
  const auto maps =
      featurize_manifest(manifest, settings_of(cfg), cfg.dataset.synth_rate, worker_count(cfg.single_thread));
  Table index{"index", {"id", "label", "class", "map", "rows", "cols"}, {}};
  for (std::size_t i = 0; i < maps.maps.size(); ++i) {
    const auto& m = maps.maps[i];
    index.rows.push_back({m.source_id, std::to_string(maps.labels[i]),
                          manifest.class_names[static_cast<std::size_t>(maps.labels[i])], "maps/" + map_file_name(m.source_id),
                          std::to_string(m.grid.rows()), std::to_string(m.grid.cols())});
  }
  r.set("map_count", static_cast<double>(maps.maps.size()));
  r.tables.push_back(std::move(index));
  r.maps = maps.maps;
  return r;
}

Report run_compare_mel(const ExperimentConfig& cfg) {
  Report r = begin(cfg, ExperimentKind::kCompareMel);
  const auto s = settings_of(cfg);
  const int rate = cfg.dataset.synth_rate;

  // Reference, same-class variants, and one clip of another class.
  std::vector<audio::AudioClip> same;
  audio::AudioClip other;
  std::vector<std::string> ids;
  if (cfg.dataset.manifest) {
    const auto m = audio::read_manifest(*cfg.dataset.manifest);
    for (const auto& e : m.entries) {
      if (e.label == 0 && same.size() < cfg.variants + 1) {
        same.push_back(audio::load_entry(e, rate));
        ids.push_back(e.id);
      }
    }
    const auto it = std::find_if(m.entries.begin(), m.entries.end(), [](const auto& e) { return e.label != 0; });
    require(same.size() == cfg.variants + 1 && it != m.entries.end(),
            "compare-mel: manifest needs variants + 1 clips of class 0 and one clip of another class");
    other = audio::load_entry(*it, rate);
    ids.push_back(it->id);
  } else {
    std::uint64_t state = derive(cfg.seed, Stream::kDataset);
    for (std::size_t k = 0; k <= cfg.variants; ++k) {
      same.push_back(audio::synthesize(siren_variant(next_u64(state)), rate));
      ids.push_back(k == 0 ? "reference" : "variant-" + std::to_string(k));
    }
    other = audio::synthesize(suite_clip("ten", "dyad", next_u64(state), cfg.dataset.background_snr_db), rate);
    ids.push_back("other-class");
  }

  std::vector<audio::AudioClip> clips = same;
  clips.push_back(other);
  const auto hopf = parallel_map<FeatureMap>(clips.size(), worker_count(cfg.single_thread),
                                             [&](std::size_t i) { return hopf_map(clips[i], s); });
  std::vector<FeatureMap> mel;
  for (const auto& c : clips) mel.push_back(mel_map(c, s));

  Table t{"distances", {"pair", "hopf", "mel", "hopf_normalized", "mel_normalized"}, {}};
  add_distance_row(t, ids[0] + "|" + ids[0], hopf[0], hopf[0], mel[0], mel[0]);
  std::vector<double> hopf_within, mel_within;
  for (std::size_t i = 0; i <= cfg.variants; ++i) {
    for (std::size_t j = i + 1; j <= cfg.variants; ++j) {
      add_distance_row(t, ids[i] + "|" + ids[j], hopf[i], hopf[j], mel[i], mel[j]);
      hopf_within.push_back(features::normalized_distance(hopf[i], hopf[j]));
      mel_within.push_back(features::normalized_distance(mel[i], mel[j]));
    }
  }
  const std::size_t o = clips.size() - 1;
  add_distance_row(t, ids[0] + "|" + ids[o], hopf[0], hopf[o], mel[0], mel[o]);

  r.set("hopf_within_normalized", hopf_within);
  r.set("mel_within_normalized", mel_within);
  r.set("hopf_within_mean_normalized", mean(hopf_within));
  r.set("mel_within_mean_normalized", mean(mel_within));
  r.set("hopf_cross_normalized", features::normalized_distance(hopf[0], hopf[o]));
  r.set("mel_cross_normalized", features::normalized_distance(mel[0], mel[o]));
  r.tables.push_back(std::move(t));
  for (std::size_t i = 0; i < clips.size(); ++i) {
    FeatureMap h = hopf[i], m = mel[i];
    h.source_id = "hopf-" + ids[i];
    m.source_id = "mel-" + ids[i];
    r.maps.push_back(std::move(h));
    r.maps.push_back(std::move(m));
  }
  return r;
}

Report run_noise_sweep(const ExperimentConfig& cfg) {
  Report r = begin(cfg, ExperimentKind::kNoiseSweep);
  const auto s = settings_of(cfg);
  audio::AudioClip clean;
  if (cfg.dataset.manifest) {
    const auto m = audio::read_manifest(*cfg.dataset.manifest);
    require(!m.entries.empty(), "noise-sweep: manifest is empty");
    clean = audio::load_entry(m.entries.front(), cfg.dataset.synth_rate);
  } else {
    clean = audio::synthesize(siren_spec(), cfg.dataset.synth_rate);
  }
  clean = audio::normalize(fit_length(clean));
  const std::uint64_t noise_seed = derive(cfg.seed, Stream::kNoise);

  std::vector<double> snrs{audio::kNoNoise};
  snrs.insert(snrs.end(), cfg.snr_db.begin(), cfg.snr_db.end());
  std::vector<audio::NoisyClip> noisy;
  for (double snr : snrs) noisy.push_back(audio::add_white_noise(clean, snr, noise_seed));

  const auto hopf = parallel_map<FeatureMap>(snrs.size() + 1, worker_count(cfg.single_thread), [&](std::size_t i) {
    return hopf_map(i == 0 ? clean : noisy[i - 1].clip, s);
  });
  const FeatureMap mel_clean = mel_map(clean, s);

  Table t{"noise_sweep", {"snr_db", "achieved_snr_db", "hopf", "mel", "hopf_normalized", "mel_normalized"}, {}};
  std::vector<double> snr_col, achieved, hopf_norm, mel_norm;
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    const FeatureMap mel_noisy = mel_map(noisy[i].clip, s);
    const double hn = features::normalized_distance(hopf[0], hopf[i + 1]);
    const double mn = features::normalized_distance(mel_clean, mel_noisy);
    t.rows.push_back({fmt(snrs[i]), fmt(noisy[i].achieved_snr_db), fmt(features::euclidean_distance(hopf[0], hopf[i + 1])),
                      fmt(features::euclidean_distance(mel_clean, mel_noisy)), fmt(hn), fmt(mn)});
    if (i == 0) continue;  // the noiseless row only anchors the table
    snr_col.push_back(snrs[i]);
    achieved.push_back(noisy[i].achieved_snr_db);
    hopf_norm.push_back(hn);
    mel_norm.push_back(mn);
    if (i + 1 == snrs.size()) {
      FeatureMap h = hopf[i + 1], m = mel_noisy;
      h.source_id = "hopf-snr-" + fmt(snrs[i]);
      m.source_id = "mel-snr-" + fmt(snrs[i]);
      r.maps.push_back(std::move(h));
      r.maps.push_back(std::move(m));
    }
  }
  r.set("snr_db", snr_col);
  r.set("achieved_snr_db", achieved);
  r.set("hopf_normalized", hopf_norm);
  r.set("mel_normalized", mel_norm);
  r.tables.push_back(std::move(t));
  FeatureMap hc = hopf[0], mc = mel_clean;
  hc.source_id = "hopf-clean";
  mc.source_id = "mel-clean";
  r.maps.insert(r.maps.begin(), {hc, mc});
  return r;
}

Report run_classify(const ExperimentConfig& cfg) {
  Report r = begin(cfg, ExperimentKind::kClassify);
  const auto manifest = load_dataset(cfg.dataset, derive(cfg.seed, Stream::kDataset));
  require(!manifest.entries.empty(), "classify: dataset is empty");
  if (manifest.class_names.size() == 1) {
    r.warnings.push_back("degenerate split: dataset has a single class, accuracy is trivially 1");
  }
  const auto split = assign_split(manifest, cfg.dataset.train_fraction, derive(cfg.seed, Stream::kSplit));
  const auto maps =
      featurize_manifest(split, settings_of(cfg), cfg.dataset.synth_rate, worker_count(cfg.single_thread));
  const auto samples = to_samples(maps);
  require(!samples.train.empty(), "classify: no training clips after the split");
  if (samples.test.empty()) r.warnings.push_back("degenerate split: no test clips, accuracy reported as 0");
  r.set("train_count", static_cast<double>(samples.train.size()));
  r.set("class_count", static_cast<double>(split.class_names.size()));

  if (cfg.readout == ReadoutKind::kRidge) {
    std::vector<int> labels;
    for (const auto& smp : samples.train) labels.push_back(smp.label);
    const auto model = readout::ridge_fit(samples.train_grids, labels, split.class_names.size(), cfg.ridge_lambda);
    readout::Evaluation ev;
    ev.confusion = readout::ConfusionMatrix(split.class_names.size());
    for (std::size_t i = 0; i < samples.test.size(); ++i) {
      const int p = readout::ridge_predict(model, samples.test_grids[i]);
      ev.predictions.push_back(p);
      ev.confusion.add(samples.test[i].label, p);
    }
    ev.accuracy = ev.confusion.accuracy();
    add_evaluation(r, ev, split.class_names, samples.test_ids, samples.test);
    return r;
  }

  auto model = readout::build_default_model(split.class_names.size(), derive(cfg.seed, Stream::kModelInit),
                                            cfg.architecture, map_shape(cfg));
  r.set("param_count", static_cast<double>(model.param_count()));
  const auto history = readout::train(model, samples.train, shuffle_seeded(cfg.train, derive(cfg.seed, Stream::kShuffle)));
  const auto ev = readout::evaluate(model, samples.test);
  add_evaluation(r, ev, split.class_names, samples.test_ids, samples.test);
  r.set("final_loss", history.epoch_loss.back());
  r.loss_history = history.epoch_loss;
  r.model = std::move(model);
  return r;
}

Report run_reconfigure(const ExperimentConfig& cfg, std::optional<readout::ReadoutModel> base) {
  Report r = begin(cfg, ExperimentKind::kReconfigure);
  if (!base && cfg.base_checkpoint) base = readout::load_checkpoint(*cfg.base_checkpoint);
  if (!base) {
    auto t = train_on(cfg, cfg.dataset, Stream::kDataset, Stream::kSplit, cfg.train.epochs);
    r.set("base_accuracy", t.evaluation.accuracy);
    base = std::move(t.model);
  }
  readout::ReadoutModel model = std::move(*base);
  require(model.input_shape() == map_shape(cfg), "reconfigure: base model input " + to_string(model.input_shape()) +
                                                     " does not match feature maps " + to_string(map_shape(cfg)));

  const auto manifest = load_dataset(cfg.task, derive(cfg.seed, Stream::kTaskDataset));
  require(!manifest.entries.empty(), "reconfigure: task dataset is empty");
  const auto split = assign_split(manifest, cfg.task.train_fraction, derive(cfg.seed, Stream::kTaskSplit));
  const auto maps = featurize_manifest(split, settings_of(cfg), cfg.task.synth_rate, worker_count(cfg.single_thread));
  const auto samples = to_samples(maps);

  std::vector<std::vector<double>> conv_before;
  for (std::size_t i = 0; i < model.flatten_index(); ++i) {
    for (const auto& p : std::as_const(model).layer(i).params()) conv_before.push_back(p.value);
  }

  auto tc = shuffle_seeded(cfg.train, derive(cfg.seed, Stream::kHead));
  tc.epochs = cfg.task_epochs;
  const auto result = readout::freeze_and_retrain_head(model, split.class_names.size(), samples.train, tc);

  std::size_t k = 0;
  bool unchanged = true;
  for (std::size_t i = 0; i < model.flatten_index(); ++i) {
    for (const auto& p : std::as_const(model).layer(i).params()) unchanged = unchanged && p.value == conv_before[k++];
  }
  const std::size_t flat = model.layer(model.flatten_index() + 1).spec().in;
  const std::size_t closed_form = readout::head_param_count(flat, cfg.architecture.hidden, split.class_names.size());

  r.set("trainable_params", static_cast<double>(result.trainable_params));
  r.set("closed_form_head_params", static_cast<double>(closed_form));
  r.set("conv_params_unchanged", unchanged ? "true" : "false");
  const auto ev = readout::evaluate(model, samples.test);
  add_evaluation(r, ev, split.class_names, samples.test_ids, samples.test);
  r.set("final_loss", result.history.epoch_loss.back());
  r.loss_history = result.history.epoch_loss;
  r.model = std::move(model);
  return r;
}

Report run_mixed_signal(const ExperimentConfig& cfg) {
  Report r = begin(cfg, ExperimentKind::kMixedSignal);
  const auto s = settings_of(cfg);
  const int rate = cfg.dataset.synth_rate;
  const FeatureMap reference = hopf_map(audio::synthesize(siren_spec(), rate), s);
  r.set("reference_self_distance", features::euclidean_distance(reference, reference));

  const std::uint64_t seed = derive(cfg.seed, Stream::kDataset);
  const double gains[] = {cfg.dominant_gain, 2.0 * cfg.dominant_gain};
  Table t{"windows", {"dominant_gain", "window", "start_s", "end_s", "distance", "normalized"}, {}};
  for (std::size_t g = 0; g < 2; ++g) {
    const auto mix = audio::synthesize(mixed_signal_spec(cfg.mixture_duration, gains[g], seed), rate);
    const auto maps = hopf_maps(mix, s);
    std::vector<double> dist, early, late;
    const std::size_t half = maps.size() / 2;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const double d = features::euclidean_distance(maps[i], reference);
      dist.push_back(d);
      (i < half ? early : late).push_back(d);
      t.rows.push_back({fmt(gains[g]), std::to_string(i + 1), fmt(static_cast<double>(i)), fmt(static_cast<double>(i + 1)),
                        fmt(d), fmt(features::normalized_distance(maps[i], reference))});
    }
    const std::string suffix = g == 0 ? "" : "_double_gain";
    r.set("window_distance" + suffix, dist);
    r.set("early_mean_distance" + suffix, mean(early));
    r.set("late_mean_distance" + suffix, mean(late));
    if (g == 0) {
      for (std::size_t i = 0; i < maps.size(); ++i) {
        FeatureMap m = maps[i];
        m.source_id = "window-" + std::to_string(i + 1);
        r.maps.push_back(std::move(m));
      }
    }
  }
  FeatureMap ref = reference;
  ref.source_id = "reference";
  r.maps.push_back(std::move(ref));
  r.tables.push_back(std::move(t));
  return r;
}

Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  switch (cfg.kind) {
    case ExperimentKind::kFeaturize: r = run_featurize(cfg); break;
    case ExperimentKind::kCompareMel: r = run_compare_mel(cfg); break;
    case ExperimentKind::kNoiseSweep: r = run_noise_sweep(cfg); break;
    case ExperimentKind::kClassify: r = run_classify(cfg); break;
    case ExperimentKind::kReconfigure: r = run_reconfigure(cfg); break;
    case ExperimentKind::kMixedSignal: r = run_mixed_signal(cfg); break;
  }
  r.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace hopfrc::harness
