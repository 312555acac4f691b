#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hopfrc/model.hpp"

namespace hopfrc::readout {

/// Versioned little-endian binary checkpoint:
///
///   "HOPFRCM1" u32 version  u64 rows cols channels  u64 adam_step  u32 n_layers
///   per layer: u8 kind  u8 activation  u8 frozen  u64 kernel in out  u32 n_blocks
///     per block: u64 n  f64[n] value  f64[n] adam_m  f64[n] adam_v
///
/// Parameters round-trip bit-exactly.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize(const ReadoutModel& model);
/// Throws ParseError (with byte offset) on malformed input.
ReadoutModel deserialize(std::span<const std::uint8_t> bytes);

void save_checkpoint(const ReadoutModel& model, const std::filesystem::path& path);
ReadoutModel load_checkpoint(const std::filesystem::path& path);

/// "epoch,loss" CSV, one row per epoch.
std::string loss_history_csv(const std::vector<double>& epoch_loss);

}  // namespace hopfrc::readout
