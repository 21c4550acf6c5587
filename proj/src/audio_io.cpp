#include "blpc/audio_io.hpp"

#include <algorithm>
#include <string_view>

#include "blpc/byte_io.hpp"
#include "blpc/error.hpp"
#include "blpc/weights.hpp"

namespace blpc
{

namespace
{

constexpr std::string_view kFeatureMagic = "BLPF";
constexpr std::size_t kFeatureHeader = 12;
constexpr std::size_t kWavHeader = 44;

bool starts_with(std::span<const std::uint8_t> bytes, std::string_view tag, std::size_t offset = 0)
{
  return bytes.size() >= offset + tag.size() && std::equal(tag.begin(), tag.end(), bytes.begin() + offset);
}

} // namespace

std::vector<std::uint8_t> serialize_features(std::span<const FeatureFrame> frames)
{
  detail::ByteWriter w;
  w.raw(kFeatureMagic);
  w.u32(static_cast<std::uint32_t>(frames.size()));
  w.u32(kFeatureDim);
  for (const auto& frame : frames)
    for (float v : frame.values())
      w.f32(v);
  return std::move(w.bytes());
}

std::vector<FeatureFrame> deserialize_features(std::span<const std::uint8_t> bytes)
{
  if (!starts_with(bytes, kFeatureMagic))
    throw Error(Errc::bad_magic, "not a feature file (expected magic 'BLPF')");
  detail::ByteReader r(bytes.subspan(kFeatureMagic.size()), Errc::format);
  const std::uint64_t frames = r.u32();
  const auto per_frame = r.u32();
  if (per_frame != kFeatureDim)
    throw Error(Errc::format, "feature file declares " + std::to_string(per_frame) + " values per frame, expected " +
                                std::to_string(kFeatureDim));
  const std::uint64_t expected = frames * kFeatureDim * 4;
  if (bytes.size() - kFeatureHeader != expected)
    throw Error(Errc::format, "feature payload is " + std::to_string(bytes.size() - kFeatureHeader) +
                                " bytes, header implies " + std::to_string(expected));
  std::vector<FeatureFrame> out;
  out.reserve(frames);
  std::array<float, kFeatureDim> values{};
  for (std::uint64_t i = 0; i < frames; ++i)
  {
    for (float& v : values)
      v = r.f32();
    out.push_back(FeatureFrame::from_values(values));
  }
  return out;
}

void write_features(std::span<const FeatureFrame> frames, const std::filesystem::path& path)
{
  write_file(path, serialize_features(frames));
}

std::vector<FeatureFrame> read_features(const std::filesystem::path& path)
{
  return deserialize_features(read_file(path));
}

std::vector<std::uint8_t> serialize_wav(std::span<const std::int16_t> samples, int sample_rate)
{
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  detail::ByteWriter w;
  w.raw("RIFF");
  w.u32(36 + data_bytes);
  w.raw("WAVE");
  w.raw("fmt ");
  w.u32(16);
  w.u16(1); // PCM
  w.u16(1); // mono
  w.u32(static_cast<std::uint32_t>(sample_rate));
  w.u32(static_cast<std::uint32_t>(sample_rate) * 2);
  w.u16(2);
  w.u16(16);
  w.raw("data");
  w.u32(data_bytes);
  for (auto s : samples)
    w.u16(static_cast<std::uint16_t>(s));
  return std::move(w.bytes());
}

std::vector<std::int16_t> deserialize_wav(std::span<const std::uint8_t> bytes, int* sample_rate)
{
  if (!starts_with(bytes, "RIFF") || !starts_with(bytes, "WAVE", 8))
    throw Error(Errc::bad_magic, "not a RIFF/WAVE file");
  if (bytes.size() < kWavHeader || !starts_with(bytes, "fmt ", 12) || !starts_with(bytes, "data", 36))
    throw Error(Errc::format, "unsupported WAV layout");
  detail::ByteReader r(bytes.subspan(20), Errc::format);
  const auto format = r.u16();
  const auto channels = r.u16();
  const auto rate = r.u32();
  r.u32();
  r.u16();
  const auto bits = r.u16();
  if (format != 1 || channels != 1 || bits != 16)
    throw Error(Errc::format, "only 16-bit mono PCM WAV is supported");
  r.str(4);
  const auto data_bytes = r.u32();
  if (data_bytes % 2 != 0 || data_bytes != bytes.size() - kWavHeader)
    throw Error(Errc::format, "WAV data chunk length mismatch");
  std::vector<std::int16_t> samples(data_bytes / 2);
  for (auto& s : samples)
    s = static_cast<std::int16_t>(r.u16());
  if (sample_rate)
    *sample_rate = static_cast<int>(rate);
  return samples;
}

void write_wav(std::span<const std::int16_t> samples, const std::filesystem::path& path, int sample_rate)
{
  write_file(path, serialize_wav(samples, sample_rate));
}

std::vector<std::int16_t> read_wav(const std::filesystem::path& path, int* sample_rate)
{
  return deserialize_wav(read_file(path), sample_rate);
}

} // namespace blpc
