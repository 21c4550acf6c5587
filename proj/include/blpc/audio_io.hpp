#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "blpc/lpc.hpp"

namespace blpc
{

/// Feature file layout (little-endian):
///   bytes 0..3   "BLPF"
///   bytes 4..7   u32 frame count
///   bytes 8..11  u32 floats per frame (must be 22)
///   then frame_count * 22 float32 values, frame-major.
std::vector<std::uint8_t> serialize_features(std::span<const FeatureFrame> frames);
/// Throws Error(bad_magic | format) for malformed headers or length mismatches.
std::vector<FeatureFrame> deserialize_features(std::span<const std::uint8_t> bytes);
void write_features(std::span<const FeatureFrame> frames, const std::filesystem::path& path);
std::vector<FeatureFrame> read_features(const std::filesystem::path& path);

/// Canonical 44-byte RIFF/WAVE header followed by 16-bit mono PCM.
std::vector<std::uint8_t> serialize_wav(std::span<const std::int16_t> samples, int sample_rate = 24000);
/// Reads exactly the layout produced by serialize_wav.
std::vector<std::int16_t> deserialize_wav(std::span<const std::uint8_t> bytes, int* sample_rate = nullptr);
void write_wav(std::span<const std::int16_t> samples, const std::filesystem::path& path, int sample_rate = 24000);
std::vector<std::int16_t> read_wav(const std::filesystem::path& path, int* sample_rate = nullptr);

} // namespace blpc
