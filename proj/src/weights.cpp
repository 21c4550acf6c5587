#include "blpc/weights.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>

#include <zlib.h>

#include "blpc/byte_io.hpp"
#include "blpc/error.hpp"
#include "blpc/flops.hpp"
#include "blpc/lpc.hpp"
#include "blpc/sampling.hpp"

namespace blpc
{

namespace
{

constexpr std::string_view kMagic = "BLPC";
constexpr std::size_t kHeaderSize = 4 + 4 + 8 + 4;

enum class TensorKind : std::uint8_t
{
  dense = 0,
  block_sparse = 1,
};

std::string shape_str(const std::vector<std::uint32_t>& shape)
{
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i)
    s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

std::size_t element_count(const std::vector<std::uint32_t>& shape)
{
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t acc, std::uint32_t d) { return acc * d; });
}

void write_config(detail::ByteWriter& w, const ModelConfig& c)
{
  w.u32(static_cast<std::uint32_t>(c.bunch_size));
  w.u32(static_cast<std::uint32_t>(c.split.high_bits));
  w.u32(static_cast<std::uint32_t>(c.split.low_bits));
  w.f64(c.mu_slope);
  w.u32(static_cast<std::uint32_t>(c.gru_a_units));
  w.u32(static_cast<std::uint32_t>(c.gru_b_units));
  w.u32(static_cast<std::uint32_t>(c.frn_dim));
  w.u32(static_cast<std::uint32_t>(c.embed_dim));
  w.u32(static_cast<std::uint32_t>(c.input_code_bits));
  w.u32(static_cast<std::uint32_t>(c.lpc_order));
  w.u32(static_cast<std::uint32_t>(c.frame_size));
  w.u32(static_cast<std::uint32_t>(c.sample_rate));
  for (double s : c.sparsity)
    w.f64(s);
}

ModelConfig read_config(detail::ByteReader& r)
{
  auto i32 = [&r] { return static_cast<int>(r.u32()); };
  ModelConfig c;
  c.bunch_size = i32();
  c.split.high_bits = i32();
  c.split.low_bits = i32();
  c.mu_slope = r.f64();
  c.gru_a_units = i32();
  c.gru_b_units = i32();
  c.frn_dim = i32();
  c.embed_dim = i32();
  c.input_code_bits = i32();
  c.lpc_order = i32();
  c.frame_size = i32();
  c.sample_rate = i32();
  for (double& s : c.sparsity)
    s = r.f64();
  return c;
}

} // namespace

std::vector<TensorSpec> expected_tensors(const ModelConfig& c)
{
  using u32 = std::uint32_t;
  const u32 a = static_cast<u32>(c.gru_a_units);
  const u32 b = static_cast<u32>(c.gru_b_units);
  const u32 f = static_cast<u32>(c.frn_dim);
  const u32 e = static_cast<u32>(c.embed_dim);
  const u32 s = static_cast<u32>(c.bunch_size);
  std::vector<TensorSpec> t = {
    {"frn.conv1.weight", {f, 3, kFeatureDim}},
    {"frn.conv1.bias", {f}},
    {"frn.conv2.weight", {f, 3, f}},
    {"frn.conv2.bias", {f}},
    {"frn.dense1.weight", {f, f}},
    {"frn.dense1.bias", {f}},
    {"frn.dense2.weight", {f, f}},
    {"frn.dense2.bias", {f}},
    {"gru_a.embed.sample", {static_cast<u32>(c.input_codes()), e}},
    {"gru_a.embed.prediction", {static_cast<u32>(c.input_codes()), e}},
    {"gru_a.embed.excitation", {static_cast<u32>(c.input_codes()), e}},
    {"gru_a.input_weight", {3 * a, 3 * s * e}},
    {"gru_a.cond_weight", {3 * a, f}},
    {"gru_a.input_bias", {3 * a}},
    {"gru_a.recurrent_weight", {3 * a, a}, true},
    {"gru_a.recurrent_bias", {3 * a}},
    {"gru_b.input_weight", {3 * b, a + f}},
    {"gru_b.input_bias", {3 * b}},
    {"gru_b.recurrent_weight", {3 * b, b}},
    {"gru_b.recurrent_bias", {3 * b}},
  };
  if (c.split.bunched())
    t.push_back({"context.embed.high", {static_cast<u32>(c.high_codes()), b}});
  t.push_back({"context.embed.full", {static_cast<u32>(c.full_codes()), b}});
  for (int i = 0; i < c.bunch_size; ++i)
  {
    const std::string p = "dual_fc." + std::to_string(i) + ".";
    auto head = [&](const std::string& branch, u32 k) {
      t.push_back({p + branch + ".w1", {k, b}});
      t.push_back({p + branch + ".w2", {k, b}});
      t.push_back({p + branch + ".a1", {k}});
      t.push_back({p + branch + ".a2", {k}});
    };
    head("high", static_cast<u32>(c.high_codes()));
    if (c.split.bunched())
      head("low", static_cast<u32>(c.low_codes()));
  }
  return t;
}

const Tensor& WeightStore::tensor(const std::string& name) const
{
  auto it = dense.find(name);
  if (it == dense.end())
    throw Error(Errc::missing_tensor, "missing tensor '" + name + "'");
  return it->second;
}

const BlockSparseMatrix& WeightStore::sparse_tensor(const std::string& name) const
{
  auto it = sparse.find(name);
  if (it == sparse.end())
    throw Error(Errc::missing_tensor, "missing sparse tensor '" + name + "'");
  return it->second;
}

void WeightStore::validate() const
{
  config.validate();
  const auto specs = expected_tensors(config);
  std::set<std::string> wanted;
  for (const auto& spec : specs)
  {
    wanted.insert(spec.name);
    if (spec.sparse)
    {
      const auto& m = sparse_tensor(spec.name);
      if (static_cast<std::uint32_t>(m.rows()) != spec.shape[0] || static_cast<std::uint32_t>(m.cols()) != spec.shape[1])
        throw Error(Errc::shape_mismatch, "tensor '" + spec.name + "' has shape [" + std::to_string(m.rows()) + "," +
                                            std::to_string(m.cols()) + "], expected " + shape_str(spec.shape));
      continue;
    }
    const auto& t = tensor(spec.name);
    if (t.shape != spec.shape)
      throw Error(Errc::shape_mismatch,
                  "tensor '" + spec.name + "' has shape " + shape_str(t.shape) + ", expected " + shape_str(spec.shape));
    if (t.values.size() != element_count(t.shape))
      throw Error(Errc::shape_mismatch, "tensor '" + spec.name + "' payload does not match its shape");
  }
  for (const auto& [name, _] : dense)
    if (!wanted.contains(name))
      throw Error(Errc::format, "unexpected tensor '" + name + "'");
  for (const auto& [name, _] : sparse)
    if (!wanted.contains(name))
      throw Error(Errc::format, "unexpected tensor '" + name + "'");
}

bool operator==(const WeightStore& a, const WeightStore& b)
{
  if (!(a.config == b.config) || a.dense != b.dense || a.sparse.size() != b.sparse.size())
    return false;
  for (const auto& [name, m] : a.sparse)
  {
    auto it = b.sparse.find(name);
    if (it == b.sparse.end() || it->second.rows() != m.rows() || it->second.cols() != m.cols())
      return false;
    const auto x = m.blocks();
    const auto y = it->second.blocks();
    if (x.size() != y.size())
      return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].row_block != y[i].row_block || x[i].col != y[i].col || x[i].values != y[i].values)
        return false;
  }
  return true;
}

std::vector<std::uint8_t> serialize_weights(const WeightStore& store)
{
  detail::ByteWriter payload;
  write_config(payload, store.config);
  payload.u32(static_cast<std::uint32_t>(store.dense.size() + store.sparse.size()));
  for (const auto& [name, t] : store.dense)
  {
    payload.u32(static_cast<std::uint32_t>(name.size()));
    payload.raw(name);
    payload.u8(static_cast<std::uint8_t>(TensorKind::dense));
    payload.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape)
      payload.u32(d);
    for (float v : t.values)
      payload.f32(v);
  }
  for (const auto& [name, m] : store.sparse)
  {
    payload.u32(static_cast<std::uint32_t>(name.size()));
    payload.raw(name);
    payload.u8(static_cast<std::uint8_t>(TensorKind::block_sparse));
    payload.u32(2);
    payload.u32(static_cast<std::uint32_t>(m.rows()));
    payload.u32(static_cast<std::uint32_t>(m.cols()));
    const auto blocks = m.blocks();
    payload.u32(static_cast<std::uint32_t>(blocks.size()));
    for (const auto& b : blocks)
    {
      payload.u32(b.row_block);
      payload.u32(b.col);
      for (float v : b.values)
        payload.f32(v);
    }
  }

  const auto& body = payload.bytes();
  detail::ByteWriter out;
  out.raw(kMagic);
  out.u32(kWeightFormatVersion);
  out.u64(body.size());
  out.u32(static_cast<std::uint32_t>(crc32(0L, body.data(), static_cast<uInt>(body.size()))));
  out.bytes().insert(out.bytes().end(), body.begin(), body.end());
  return std::move(out.bytes());
}

WeightStore deserialize_weights(std::span<const std::uint8_t> bytes)
{
  if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw Error(Errc::bad_magic, "not a weight file (expected magic 'BLPC')");
  detail::ByteReader header(bytes.subspan(kMagic.size()), Errc::checksum);
  const auto version = header.u32();
  if (version != kWeightFormatVersion)
    throw Error(Errc::version_mismatch, "weight file version " + std::to_string(version) + ", this build reads " +
                                          std::to_string(kWeightFormatVersion));
  const auto declared = header.u64();
  const auto crc = header.u32();
  const auto body = bytes.subspan(std::min(bytes.size(), kHeaderSize));
  if (body.size() != declared)
    throw Error(Errc::checksum, "weight payload is " + std::to_string(body.size()) + " bytes, header declares " +
                                  std::to_string(declared));
  if (crc32(0L, body.data(), static_cast<uInt>(body.size())) != crc)
    throw Error(Errc::checksum, "weight payload checksum mismatch");

  detail::ByteReader r(body, Errc::format);
  WeightStore store;
  store.config = read_config(r);
  store.config.validate();
  const auto count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i)
  {
    const auto name = r.str(r.u32());
    const auto kind = r.u8();
    const auto ndim = r.u32();
    if (ndim > 8)
      throw Error(Errc::format, "tensor '" + name + "' declares " + std::to_string(ndim) + " dimensions");
    std::vector<std::uint32_t> shape(ndim);
    for (auto& d : shape)
      d = r.u32();
    if (store.dense.contains(name) || store.sparse.contains(name))
      throw Error(Errc::format, "duplicate tensor '" + name + "'");
    if (kind == static_cast<std::uint8_t>(TensorKind::dense))
    {
      const std::size_t n = element_count(shape);
      if (n * 4 > r.remaining())
        throw Error(Errc::format, "tensor '" + name + "' payload exceeds file");
      Tensor t{shape, std::vector<float>(n)};
      for (float& v : t.values)
        v = r.f32();
      store.dense.emplace(name, std::move(t));
    }
    else if (kind == static_cast<std::uint8_t>(TensorKind::block_sparse) && ndim == 2)
    {
      const auto nblocks = r.u32();
      if (static_cast<std::size_t>(nblocks) * (8 + 4 * kBlockRows) > r.remaining())
        throw Error(Errc::format, "tensor '" + name + "' block list exceeds file");
      std::vector<BlockSparseMatrix::Block> blocks(nblocks);
      for (auto& b : blocks)
      {
        b.row_block = r.u32();
        b.col = r.u32();
        for (float& v : b.values)
          v = r.f32();
      }
      try
      {
        store.sparse.emplace(name, BlockSparseMatrix::from_blocks(static_cast<int>(shape[0]), static_cast<int>(shape[1]),
                                                                  std::move(blocks)));
      }
      catch (const Error& e)
      {
        throw Error(Errc::format, "tensor '" + name + "': " + e.what());
      }
    }
    else
    {
      throw Error(Errc::format, "tensor '" + name + "' has unknown kind " + std::to_string(kind));
    }
  }
  if (r.remaining() != 0)
    throw Error(Errc::format, "trailing bytes after the last tensor");
  store.validate();
  return store;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::io, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(Errc::io, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw Error(Errc::io, "write to '" + path.string() + "' failed");
}

void save_weights(const WeightStore& store, const std::filesystem::path& path)
{
  store.validate();
  write_file(path, serialize_weights(store));
}

WeightStore load_weights(const std::filesystem::path& path)
{
  return deserialize_weights(read_file(path));
}

WeightStore generate_test_weights(std::uint64_t seed, const ModelConfig& config)
{
  config.validate();
  Rng rng(seed);
  auto uniform = [&rng] { return static_cast<float>((2.0 * rng.uniform() - 1.0) * 0.1); };

  WeightStore store;
  store.config = config;
  for (const auto& spec : expected_tensors(config))
  {
    if (spec.sparse)
    {
      const int rows = static_cast<int>(spec.shape[0]);
      const int cols = static_cast<int>(spec.shape[1]);
      const int blocks_per_gate = rows / 3 / kBlockRows;
      std::vector<BlockSparseMatrix::Block> blocks;
      for (int gate = 0; gate < 3; ++gate)
      {
        const std::size_t capacity = static_cast<std::size_t>(blocks_per_gate) * static_cast<std::size_t>(cols);
        const auto wanted = static_cast<std::size_t>(gate_blocks(config, gate));
        std::vector<std::uint32_t> slots(capacity);
        std::iota(slots.begin(), slots.end(), 0u);
        for (std::size_t i = 0; i < wanted; ++i)
        {
          const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(capacity - i));
          std::swap(slots[i], slots[j]);
        }
        std::sort(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(wanted));
        for (std::size_t i = 0; i < wanted; ++i)
        {
          BlockSparseMatrix::Block b;
          b.row_block = static_cast<std::uint32_t>(gate * blocks_per_gate) + slots[i] / static_cast<std::uint32_t>(cols);
          b.col = slots[i] % static_cast<std::uint32_t>(cols);
          for (float& v : b.values)
            v = uniform();
          blocks.push_back(b);
        }
      }
      store.sparse.emplace(spec.name, BlockSparseMatrix::from_blocks(rows, cols, std::move(blocks)));
      continue;
    }
    Tensor t{spec.shape, std::vector<float>(element_count(spec.shape))};
    for (float& v : t.values)
      v = uniform();
    store.dense.emplace(spec.name, std::move(t));
  }
  return store;
}

} // namespace blpc
