#include "hopfrc/config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>

#include "hopfrc/error.hpp"
#include "json.hpp"

namespace hopfrc::harness {
namespace {

using nlohmann::json;

constexpr std::string_view kKindNames[] = {"featurize", "compare-mel", "noise-sweep",
                                           "classify",  "reconfigure", "mixed-signal"};

[[noreturn]] void bad(const std::string& what) { throw ParseError("config: " + what, 0); }

// Reads members of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) bad("'" + name_ + "' must be an object");
  }
  // Call after the last find()/get().
  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) bad("unknown key '" + qualified(key) + "'");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    if (!find(key)) return;
    T v{};
    get(key, v);
    out = v;
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw std::invalid_argument("expected boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw std::invalid_argument("expected integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v->is_number_integer() && !v->is_number_unsigned()) throw std::invalid_argument("expected value >= 0");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw std::invalid_argument("expected number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw std::invalid_argument("expected string");
      }
      out = v->get<T>();
    } catch (const std::exception& e) {
      bad("'" + qualified(key) + "': " + e.what());
    }
  }

  std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

void read_dataset(const json& j, const std::string& name, const std::filesystem::path& base, DatasetSource& d) {
  Section s(j, name);
  if (const json* m = s.find("manifest"); m && !m->is_null()) {
    if (!m->is_string()) bad("'" + s.qualified("manifest") + "': expected string");
    d.manifest = resolve(base, m->get<std::string>());
  }
  s.get("suite", d.suite);
  s.get("clips_per_class", d.clips_per_class);
  if (const json* b = s.find("background_snr_db")) {
    if (b->is_null()) {
      d.background_snr_db.reset();
    } else if (b->is_number()) {
      d.background_snr_db = b->get<double>();
    } else {
      bad("'" + s.qualified("background_snr_db") + "': expected number or null");
    }
  }
  s.get("train_fraction", d.train_fraction);
  s.get("synth_rate", d.synth_rate);
  s.done();
}

json dataset_json(const DatasetSource& d) {
  json j;
  j["manifest"] = d.manifest ? json(d.manifest->generic_string()) : json(nullptr);
  j["suite"] = d.suite;
  j["clips_per_class"] = d.clips_per_class;
  j["background_snr_db"] = d.background_snr_db ? json(*d.background_snr_db) : json(nullptr);
  j["train_fraction"] = d.train_fraction;
  j["synth_rate"] = d.synth_rate;
  return j;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::string_view to_string(ExperimentKind kind) { return kKindNames[static_cast<int>(kind)]; }

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == name) return static_cast<ExperimentKind>(i);
  }
  throw ParseError("unknown experiment kind '" + std::string(name) + "'", 0);
}

void DatasetSource::validate() const {
  if (!manifest) {
    require(clips_per_class >= 1, "dataset: clips_per_class must be >= 1");
  }
  require(train_fraction > 0.0 && train_fraction <= 1.0, "dataset: train_fraction must be in (0, 1]");
  require(synth_rate >= audio::kReservoirRate, "dataset: synth_rate must be >= 4000");
}

void ExperimentConfig::validate() const {
  reservoir.validate();
  activation.validate();
  dataset.validate();
  train.validate();
  require(train.epochs >= 1, "train: epochs must be >= 1");
  require(ridge_lambda > 0.0, "ridge_lambda must be > 0");
  require(!architecture.conv_channels.empty() && architecture.convs_per_block >= 1 && architecture.kernel % 2 == 1 &&
              architecture.hidden >= 1,
          "architecture: need >= 1 block, >= 1 conv per block, odd kernel, hidden >= 1");
  for (double s : snr_db) require(!std::isnan(s), "snr_db: NaN entry");
  require(variants >= 1, "variants must be >= 1");
  if (kind == ExperimentKind::kReconfigure) {
    task.validate();
    require(task_epochs >= 1, "task_epochs must be >= 1");
  }
  require(mixture_duration >= 2.0 && dominant_gain > 0.0, "mixed-signal: need duration >= 2 s and gain > 0");
  if (dataset.manifest) {
    require(std::filesystem::exists(*dataset.manifest), "dataset manifest not found: " + dataset.manifest->string());
  }
  if (base_checkpoint) {
    require(std::filesystem::exists(*base_checkpoint), "base checkpoint not found: " + base_checkpoint->string());
  }
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }

  ExperimentConfig cfg;
  Section top(root, "");
  if (const json* k = top.find("kind")) {
    if (!k->is_string()) bad("'kind': expected string");
    cfg.kind = parse_experiment_kind(k->get<std::string>());
  }
  top.get("seed", cfg.seed);
  if (const json* o = top.find("out")) {
    if (!o->is_string()) bad("'out': expected string");
    cfg.out = o->get<std::string>();
  }
  if (const json* r = top.find("reservoir")) {
    Section s(*r, "reservoir");
    auto& h = cfg.reservoir.hopf;
    std::optional<double> omega0_hz, forcing_hz;
    s.get("mu", h.mu);
    s.get("omega0_hz", omega0_hz);
    s.get("amp", h.amp);
    s.get("forcing_hz", forcing_hz);
    s.get("amp_scale", h.amp_scale);
    if (omega0_hz) h.omega0 = kTwoPi * *omega0_hz;
    if (forcing_hz) h.omega_f = kTwoPi * *forcing_hz;
    s.get("substeps", cfg.reservoir.integrator.substeps);
    s.get("n_virtual", cfg.reservoir.integrator.n_virtual);
    s.get("washout_s", cfg.reservoir.washout_s);
    s.done();
  }
  if (const json* a = top.find("activation")) {
    Section s(*a, "activation");
    s.get("apply_atanh", cfg.activation.apply_atanh);
    s.get("clamp_margin", cfg.activation.clamp_margin);
    s.done();
  }
  if (const json* m = top.find("mel")) {
    Section s(*m, "mel");
    s.get("n_bands", cfg.mel.n_bands);
    s.get("hop_s", cfg.mel.hop_s);
    s.get("log_floor", cfg.mel.log_floor);
    s.done();
  }
  if (const json* d = top.find("dataset")) read_dataset(*d, "dataset", base_dir, cfg.dataset);
  if (const json* r = top.find("readout")) {
    if (!r->is_string()) bad("'readout': expected string");
    const auto name = r->get<std::string>();
    if (name == "cnn") {
      cfg.readout = ReadoutKind::kCnn;
    } else if (name == "ridge") {
      cfg.readout = ReadoutKind::kRidge;
    } else {
      bad("'readout': expected \"cnn\" or \"ridge\"");
    }
  }
  if (const json* a = top.find("architecture")) {
    Section s(*a, "architecture");
    s.get("conv_channels", cfg.architecture.conv_channels);
    s.get("convs_per_block", cfg.architecture.convs_per_block);
    s.get("kernel", cfg.architecture.kernel);
    s.get("hidden", cfg.architecture.hidden);
    s.done();
  }
  if (const json* t = top.find("train")) {
    Section s(*t, "train");
    s.get("learning_rate", cfg.train.learning_rate);
    s.get("batch_size", cfg.train.batch_size);
    s.get("epochs", cfg.train.epochs);
    s.get("shuffle", cfg.train.shuffle);
    s.done();
  }
  top.get("ridge_lambda", cfg.ridge_lambda);
  top.get("snr_db", cfg.snr_db);
  top.get("variants", cfg.variants);
  if (const json* b = top.find("base_checkpoint"); b && !b->is_null()) {
    if (!b->is_string()) bad("'base_checkpoint': expected string");
    cfg.base_checkpoint = resolve(base_dir, b->get<std::string>());
  }
  if (const json* t = top.find("task")) read_dataset(*t, "task", base_dir, cfg.task);
  top.get("task_epochs", cfg.task_epochs);
  top.get("mixture_duration", cfg.mixture_duration);
  top.get("dominant_gain", cfg.dominant_gain);
  top.get("single_thread", cfg.single_thread);
  top.done();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.parent_path());
}

std::string canonical_json(const ExperimentConfig& cfg) {
  const auto& h = cfg.reservoir.hopf;
  json j;
  j["kind"] = std::string(to_string(cfg.kind));
  j["seed"] = cfg.seed;
  j["reservoir"] = {{"mu", h.mu},
                    {"omega0_hz", h.omega0 / kTwoPi},
                    {"amp", h.amp},
                    {"forcing_hz", h.omega_f / kTwoPi},
                    {"amp_scale", h.amp_scale},
                    {"substeps", cfg.reservoir.integrator.substeps},
                    {"n_virtual", cfg.reservoir.integrator.n_virtual},
                    {"washout_s", cfg.reservoir.washout_s}};
  j["activation"] = {{"apply_atanh", cfg.activation.apply_atanh}, {"clamp_margin", cfg.activation.clamp_margin}};
  j["mel"] = {{"n_bands", cfg.mel.n_bands}, {"hop_s", cfg.mel.hop_s}, {"log_floor", cfg.mel.log_floor}};
  j["dataset"] = dataset_json(cfg.dataset);
  j["readout"] = cfg.readout == ReadoutKind::kCnn ? "cnn" : "ridge";
  j["architecture"] = {{"conv_channels", cfg.architecture.conv_channels},
                       {"convs_per_block", cfg.architecture.convs_per_block},
                       {"kernel", cfg.architecture.kernel},
                       {"hidden", cfg.architecture.hidden}};
  j["train"] = {{"learning_rate", cfg.train.learning_rate},
                {"batch_size", cfg.train.batch_size},
                {"epochs", cfg.train.epochs},
                {"shuffle", cfg.train.shuffle}};
  j["ridge_lambda"] = cfg.ridge_lambda;
  j["snr_db"] = cfg.snr_db;
  j["variants"] = cfg.variants;
  j["base_checkpoint"] = cfg.base_checkpoint ? json(cfg.base_checkpoint->generic_string()) : json(nullptr);
  j["task"] = dataset_json(cfg.task);
  j["task_epochs"] = cfg.task_epochs;
  j["mixture_duration"] = cfg.mixture_duration;
  j["dominant_gain"] = cfg.dominant_gain;
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_json(cfg)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

}  // namespace hopfrc::harness
