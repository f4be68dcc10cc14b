#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "specsense/dataset.hpp"

namespace specsense {

/// On-disk dataset: `manifest.json` plus `features.bin`.
///
/// features.bin is the concatenation of every record's raw feature
/// sequence as little-endian float64, T x 4 values per record, records in
/// manifest order (train, validation, test). The manifest lists the
/// configuration, master seed, normalizer, CRC32 (IEEE) of features.bin,
/// and per record its split, label, snr_db, instance, and offset/length in
/// float64 units.
inline constexpr int kDatasetStoreVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kFeatureStoreFile = "features.bin";

/// CRC32 (IEEE 802.3 polynomial) of a byte buffer.
std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) noexcept;

/// Creates `dir` if needed and writes both files.
void save_dataset(const LabeledDataset& dataset, const std::filesystem::path& dir);

/// Validates the manifest version before touching the feature store, then
/// verifies the checksum; any failure throws before a dataset is returned.
LabeledDataset load_dataset(const std::filesystem::path& dir);

}  // namespace specsense
