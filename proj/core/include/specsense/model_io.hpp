#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "specsense/baselines.hpp"
#include "specsense/train.hpp"

namespace specsense {

/// Versioned binary model container:
///   "SSMD" | u16 version | u8 kind | u8 reserved(0) | kind payload
/// All integers and floats little-endian; matrices row-major float64.
///   Lstm: u32 i | u32 h | Wfx Wfh bf | Wcx Wch bc | Wix Wih bi | Wox Woh bo |
///         head W (2 x h) | head b (2) | normalizer mean(4) stddev(4)
///   Gnb:  f64 variance_smoothing | prior(2) | mean(2x4) | var(2x4) | normalizer
///   Mlp:  u32 i | u32 h | W1 (h x i) | b1 | W2 (2 x h) | b2 | normalizer
enum class ModelKind : std::uint8_t { Lstm = 1, Gnb = 2, Mlp = 3 };

inline constexpr std::uint16_t kModelFileVersion = 1;

std::vector<std::uint8_t> encode_lstm_model(const LstmNetwork& net, const Normalizer& normalizer);
std::vector<std::uint8_t> encode_gnb_model(const GnbModel& model, const Normalizer& normalizer);
std::vector<std::uint8_t> encode_mlp_model(const MlpModel& model, const Normalizer& normalizer);

struct DecodedModel {
  ModelKind kind = ModelKind::Lstm;
  LstmNetwork lstm;
  GnbModel gnb;
  MlpModel mlp;
  Normalizer normalizer;
};

DecodedModel decode_model(const std::vector<std::uint8_t>& bytes);

void save_model(const std::filesystem::path& path, const std::vector<std::uint8_t>& encoded);
DecodedModel load_model(const std::filesystem::path& path);

/// Loads an LSTM model file into a TrainedModel (empty training log).
TrainedModel load_lstm_model(const std::filesystem::path& path);

}  // namespace specsense
