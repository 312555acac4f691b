#include "hopfrc/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hopfrc/error.hpp"

namespace hopfrc::readout {
namespace {

constexpr char kMagic[8] = {'H', 'O', 'P', 'F', 'R', 'C', 'M', '1'};

class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  template <typename T>
  void le(T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  void f64s(const std::vector<double>& v) {
    for (double d : v) le(std::bit_cast<std::uint64_t>(d));
  }
  std::vector<std::uint8_t> out;
};

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::size_t offset() const { return pos_; }
  template <typename T>
  T le() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  std::vector<double> f64s(std::uint64_t n) {
    need(n * 8);
    std::vector<double> v(n);
    for (auto& d : v) d = std::bit_cast<double>(le<std::uint64_t>());
    return v;
  }
  void need(std::uint64_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw ParseError("checkpoint: truncated at byte " + std::to_string(pos_), pos_);
    }
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const ReadoutModel& model) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.le<std::uint32_t>(kCheckpointVersion);
  const Shape in = model.input_shape();
  w.le<std::uint64_t>(in.rows);
  w.le<std::uint64_t>(in.cols);
  w.le<std::uint64_t>(in.channels);
  w.le<std::uint64_t>(model.adam_step);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(model.layer_count()));
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    const Layer& l = model.layer(i);
    const LayerSpec s = l.spec();
    w.le<std::uint8_t>(static_cast<std::uint8_t>(s.kind));
    w.le<std::uint8_t>(static_cast<std::uint8_t>(s.activation));
    w.le<std::uint8_t>(l.frozen() ? 1 : 0);
    w.le<std::uint64_t>(s.kernel);
    w.le<std::uint64_t>(s.in);
    w.le<std::uint64_t>(s.out);
    const auto blocks = l.params();
    w.le<std::uint32_t>(static_cast<std::uint32_t>(blocks.size()));
    for (const auto& b : blocks) {
      w.le<std::uint64_t>(b.size());
      w.f64s(b.value);
      w.f64s(b.m);
      w.f64s(b.v);
    }
  }
  return std::move(w.out);
}

ReadoutModel deserialize(std::span<const std::uint8_t> bytes) {
  Cursor c(bytes);
  const auto magic = c.take(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) throw ParseError("checkpoint: bad magic at byte 0", 0);
  const auto version_at = c.offset();
  const auto version = c.le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint: unsupported version " + std::to_string(version), version_at);
  }
  Shape in;
  in.rows = c.le<std::uint64_t>();
  in.cols = c.le<std::uint64_t>();
  in.channels = c.le<std::uint64_t>();
  const auto adam_step = c.le<std::uint64_t>();
  const auto n_layers = c.le<std::uint32_t>();

  std::vector<LayerSpec> specs;
  std::vector<bool> frozen;
  std::vector<std::vector<ParamBlock>> blocks;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const std::size_t layer_at = c.offset();
    LayerSpec s;
    const auto kind = c.le<std::uint8_t>();
    if (kind < 1 || kind > 4) throw ParseError("checkpoint: bad layer kind at byte " + std::to_string(layer_at), layer_at);
    s.kind = static_cast<LayerKind>(kind);
    const auto act = c.le<std::uint8_t>();
    if (act > 1) throw ParseError("checkpoint: bad activation at byte " + std::to_string(layer_at + 1), layer_at + 1);
    s.activation = static_cast<Activation>(act);
    frozen.push_back(c.le<std::uint8_t>() != 0);
    s.kernel = c.le<std::uint64_t>();
    s.in = c.le<std::uint64_t>();
    s.out = c.le<std::uint64_t>();
    const auto n_blocks = c.le<std::uint32_t>();
    std::vector<ParamBlock> bl;
    for (std::uint32_t b = 0; b < n_blocks; ++b) {
      const auto n = c.le<std::uint64_t>();
      c.need(n * 24);
      ParamBlock p;
      p.value = c.f64s(n);
      p.m = c.f64s(n);
      p.v = c.f64s(n);
      p.grad.assign(n, 0.0);
      bl.push_back(std::move(p));
    }
    specs.push_back(s);
    blocks.push_back(std::move(bl));
  }
  if (c.offset() != bytes.size()) {
    throw ParseError("checkpoint: trailing bytes at " + std::to_string(c.offset()), c.offset());
  }

  ReadoutModel model;
  try {
    model = ReadoutModel(in, specs, 0);
  } catch (const Error& e) {
    throw ParseError(std::string("checkpoint: inconsistent layer stack: ") + e.what(), 0);
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto dst = model.layer(i).params();
    if (dst.size() != blocks[i].size()) throw ParseError("checkpoint: parameter block count mismatch", 0);
    for (std::size_t b = 0; b < dst.size(); ++b) {
      if (dst[b].size() != blocks[i][b].size()) throw ParseError("checkpoint: parameter size mismatch", 0);
      dst[b] = std::move(blocks[i][b]);
    }
    model.layer(i).set_frozen(frozen[i]);
  }
  model.adam_step = adam_step;
  return model;
}

void save_checkpoint(const ReadoutModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "save_checkpoint: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "save_checkpoint: write failed for " + path.string());
}

ReadoutModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "load_checkpoint: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

std::string loss_history_csv(const std::vector<double>& epoch_loss) {
  std::string out = "epoch,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < epoch_loss.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, epoch_loss[i]);
    out += buf;
  }
  return out;
}

}  // namespace hopfrc::readout
