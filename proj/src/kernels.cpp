#include "blpc/kernels.hpp"

#include <algorithm>
#include <string>

#include "blpc/activations.hpp"
#include "blpc/error.hpp"

namespace blpc
{

namespace
{

void require(bool ok, const std::string& what)
{
  if (!ok)
    throw Error(Errc::invalid_input, what);
}

// Hot-path variant: the message is only built on failure.
template <class Message>
inline void check(bool ok, Message&& message)
{
  if (!ok) [[unlikely]]
    throw Error(Errc::invalid_input, message());
}

std::string dims(std::size_t a, std::size_t b)
{
  return std::to_string(a) + " vs " + std::to_string(b);
}

// y[0..T) += sum_c v[c] * column_c[0..T), columns `stride` floats apart. The
// tile stays in registers and even and odd columns go to separate
// accumulators, so the adds form two short dependency chains instead of one
// long chain through memory.
template <std::size_t T>
inline void accumulate_tile(const float* __restrict base, std::size_t stride, const float* __restrict v,
                            std::size_t cols, float* __restrict y) noexcept
{
  float even[T];
  float odd[T];
  for (std::size_t i = 0; i < T; ++i)
  {
    even[i] = y[i];
    odd[i] = 0.0f;
  }
  std::size_t c = 0;
  for (; c + 1 < cols; c += 2)
  {
    const float* a = base + c * stride;
    const float* b = a + stride;
    const float va = v[c];
    const float vb = v[c + 1];
    for (std::size_t i = 0; i < T; ++i)
      even[i] += va * a[i];
    for (std::size_t i = 0; i < T; ++i)
      odd[i] += vb * b[i];
  }
  if (c < cols)
  {
    const float* a = base + c * stride;
    for (std::size_t i = 0; i < T; ++i)
      even[i] += v[c] * a[i];
  }
  for (std::size_t i = 0; i < T; ++i)
    y[i] = even[i] + odd[i];
}

// Same arithmetic for a row count that is not a multiple of 16.
void accumulate_rows(const float* base, std::size_t stride, const float* v, std::size_t cols, float* y,
                     std::size_t rows) noexcept
{
  for (std::size_t i = 0; i < rows; ++i)
  {
    float even = y[i];
    float odd = 0.0f;
    std::size_t c = 0;
    for (; c + 1 < cols; c += 2)
    {
      even += v[c] * base[c * stride + i];
      odd += v[c + 1] * base[(c + 1) * stride + i];
    }
    if (c < cols)
      even += v[c] * base[c * stride + i];
    y[i] = even + odd;
  }
}

} // namespace

DenseMatrix::DenseMatrix(int rows, int cols)
: rows_(rows)
, cols_(cols)
, data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0f)
{
  require(rows >= 0 && cols >= 0, "negative matrix dimensions");
}

DenseMatrix DenseMatrix::from_row_major(int rows, int cols, std::span<const float> values)
{
  DenseMatrix m(rows, cols);
  require(values.size() == m.data_.size(),
          "dense matrix payload size mismatch: " + dims(values.size(), m.data_.size()));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m.data_[static_cast<std::size_t>(c) * rows + r] = values[static_cast<std::size_t>(r) * cols + c];
  return m;
}

std::vector<float> DenseMatrix::to_row_major() const
{
  std::vector<float> out(data_.size());
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      out[static_cast<std::size_t>(r) * cols_ + c] = at(r, c);
  return out;
}

void DenseMatrix::matvec_accumulate(std::span<const float> v, std::span<float> out) const
{
  check(v.size() == static_cast<std::size_t>(cols_), [&] { return std::string("dense matvec input size " + dims(v.size(), cols_)); });
  matvec_accumulate_columns(0, v, out);
}

void DenseMatrix::matvec_accumulate_columns(int first, std::span<const float> v, std::span<float> out) const
{
  check(out.size() == static_cast<std::size_t>(rows_), [&] { return std::string("dense matvec output size " + dims(out.size(), rows_)); });
  check(first >= 0 && static_cast<std::size_t>(first) + v.size() <= static_cast<std::size_t>(cols_), [&] { return std::string("dense matvec column range out of bounds"); });
  const std::size_t n = static_cast<std::size_t>(rows_);
  const float* base = data_.data() + static_cast<std::size_t>(first) * n;
  const float* x = v.data();
  const std::size_t cols = v.size();
  float* y = out.data();
  std::size_t r = 0;
  for (; r + 64 <= n; r += 64)
    accumulate_tile<64>(base + r, n, x, cols, y + r);
  switch (n - r)
  {
  case 48:
    accumulate_tile<48>(base + r, n, x, cols, y + r);
    break;
  case 32:
    accumulate_tile<32>(base + r, n, x, cols, y + r);
    break;
  case 16:
    accumulate_tile<16>(base + r, n, x, cols, y + r);
    break;
  default:
    accumulate_rows(base + r, n, x, cols, y + r, n - r);
  }
}

std::vector<float> dense_matvec(const DenseMatrix& m, std::span<const float> v)
{
  std::vector<float> out(static_cast<std::size_t>(m.rows()), 0.0f);
  m.matvec_accumulate(v, out);
  return out;
}

BlockSparseMatrix BlockSparseMatrix::from_blocks(int rows, int cols, std::vector<Block> blocks)
{
  require(rows >= 0 && cols >= 0, "negative matrix dimensions");
  require(rows % kBlockRows == 0, "block-sparse rows must be a multiple of 16, got " + std::to_string(rows));
  const auto row_blocks = static_cast<std::uint32_t>(rows / kBlockRows);
  for (const auto& b : blocks)
    require(b.row_block < row_blocks && b.col < static_cast<std::uint32_t>(cols),
            "block (" + std::to_string(b.row_block) + "," + std::to_string(b.col) + ") outside matrix");
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    return a.row_block != b.row_block ? a.row_block < b.row_block : a.col < b.col;
  });
  for (std::size_t i = 1; i < blocks.size(); ++i)
    require(blocks[i].row_block != blocks[i - 1].row_block || blocks[i].col != blocks[i - 1].col,
            "duplicate block (" + std::to_string(blocks[i].row_block) + "," + std::to_string(blocks[i].col) + ")");

  BlockSparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(row_blocks + 1, 0);
  m.cols_idx_.reserve(blocks.size());
  m.values_.reserve(blocks.size() * kBlockRows);
  for (const auto& b : blocks)
  {
    ++m.row_ptr_[b.row_block + 1];
    m.cols_idx_.push_back(b.col);
    m.values_.insert(m.values_.end(), b.values.begin(), b.values.end());
  }
  for (std::size_t i = 1; i < m.row_ptr_.size(); ++i)
    m.row_ptr_[i] += m.row_ptr_[i - 1];
  return m;
}

BlockSparseMatrix BlockSparseMatrix::from_dense_row_major(int rows, int cols, std::span<const float> values)
{
  require(values.size() == static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
          "dense payload size mismatch");
  require(rows % kBlockRows == 0, "block-sparse rows must be a multiple of 16");
  std::vector<Block> blocks;
  for (int rb = 0; rb < rows / kBlockRows; ++rb)
    for (int c = 0; c < cols; ++c)
    {
      Block b{static_cast<std::uint32_t>(rb), static_cast<std::uint32_t>(c), {}};
      bool any = false;
      for (int i = 0; i < kBlockRows; ++i)
      {
        b.values[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(rb * kBlockRows + i) * cols + c];
        any = any || b.values[static_cast<std::size_t>(i)] != 0.0f;
      }
      if (any)
        blocks.push_back(b);
    }
  return from_blocks(rows, cols, std::move(blocks));
}

std::vector<BlockSparseMatrix::Block> BlockSparseMatrix::blocks() const
{
  std::vector<Block> out;
  out.reserve(cols_idx_.size());
  for (std::size_t rb = 0; rb + 1 < row_ptr_.size(); ++rb)
    for (std::uint32_t k = row_ptr_[rb]; k < row_ptr_[rb + 1]; ++k)
    {
      Block b{static_cast<std::uint32_t>(rb), cols_idx_[k], {}};
      std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(k) * kBlockRows, kBlockRows, b.values.begin());
      out.push_back(b);
    }
  return out;
}

std::vector<float> BlockSparseMatrix::densify() const
{
  std::vector<float> dense(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0f);
  for (const auto& b : blocks())
    for (int i = 0; i < kBlockRows; ++i)
      dense[(static_cast<std::size_t>(b.row_block) * kBlockRows + i) * cols_ + b.col] =
        b.values[static_cast<std::size_t>(i)];
  return dense;
}

std::vector<std::size_t> BlockSparseMatrix::group_block_counts(int groups) const
{
  require(groups > 0 && (rows_ / kBlockRows) % groups == 0, "row blocks do not divide into groups");
  const std::size_t per_group = static_cast<std::size_t>(rows_ / kBlockRows / groups);
  std::vector<std::size_t> counts(static_cast<std::size_t>(groups), 0);
  for (std::size_t rb = 0; rb + 1 < row_ptr_.size(); ++rb)
    counts[rb / per_group] += row_ptr_[rb + 1] - row_ptr_[rb];
  return counts;
}

std::vector<double> BlockSparseMatrix::group_density(int groups) const
{
  const auto counts = group_block_counts(groups);
  const double capacity = static_cast<double>(rows_ / kBlockRows / groups) * cols_;
  std::vector<double> density;
  for (auto c : counts)
    density.push_back(capacity > 0 ? static_cast<double>(c) / capacity : 0.0);
  return density;
}

void BlockSparseMatrix::matvec_accumulate(std::span<const float> v, std::span<float> out) const
{
  check(v.size() == static_cast<std::size_t>(cols_), [&] { return std::string("sparse matvec input size " + dims(v.size(), cols_)); });
  check(out.size() == static_cast<std::size_t>(rows_), [&] { return std::string("sparse matvec output size " + dims(out.size(), rows_)); });
  const float* x = v.data();
  const std::uint32_t* idx = cols_idx_.data();
  const float* w = values_.data();
  for (std::size_t rb = 0; rb + 1 < row_ptr_.size(); ++rb)
  {
    // Two accumulators (even and odd blocks of the row) halve the add chain.
    float even[kBlockRows];
    float odd[kBlockRows];
    float* y = out.data() + rb * kBlockRows;
    for (int i = 0; i < kBlockRows; ++i)
    {
      even[i] = y[i];
      odd[i] = 0.0f;
    }
    std::uint32_t k = row_ptr_[rb];
    const std::uint32_t end = row_ptr_[rb + 1];
    for (; k + 1 < end; k += 2)
    {
      const float xa = x[idx[k]];
      const float xb = x[idx[k + 1]];
      const float* a = w + static_cast<std::size_t>(k) * kBlockRows;
      const float* b = a + kBlockRows;
      for (int i = 0; i < kBlockRows; ++i)
        even[i] += xa * a[i];
      for (int i = 0; i < kBlockRows; ++i)
        odd[i] += xb * b[i];
    }
    if (k < end)
    {
      const float xa = x[idx[k]];
      const float* a = w + static_cast<std::size_t>(k) * kBlockRows;
      for (int i = 0; i < kBlockRows; ++i)
        even[i] += xa * a[i];
    }
    for (int i = 0; i < kBlockRows; ++i)
      y[i] = even[i] + odd[i];
  }
}

std::vector<float> sparse_matvec(const BlockSparseMatrix& m, std::span<const float> v)
{
  std::vector<float> out(static_cast<std::size_t>(m.rows()), 0.0f);
  m.matvec_accumulate(v, out);
  return out;
}

void gru_update(std::span<float> state, std::span<const float> input_contrib, std::span<float> recurrent_contrib)
{
  const std::size_t n = state.size();
  check(input_contrib.size() == 3 * n, [&] { return std::string("GRU input contribution size " + dims(input_contrib.size(), 3 * n)); });
  check(recurrent_contrib.size() == 3 * n, [&] { return std::string("GRU recurrent contribution size " + dims(recurrent_contrib.size(), 3 * n)); });
  const float* x = input_contrib.data();
  float* g = recurrent_contrib.data();
  float* h = state.data();
  // Gates in place: g[0..2n) become z and r.
  for (std::size_t i = 0; i < 2 * n; ++i)
    g[i] = fast_sigmoid(x[i] + g[i]);
  for (std::size_t i = 0; i < n; ++i)
    g[2 * n + i] = fast_tanh(x[2 * n + i] + g[n + i] * g[2 * n + i]);
  for (std::size_t i = 0; i < n; ++i)
    h[i] = g[i] * h[i] + (1.0f - g[i]) * g[2 * n + i];
}

namespace
{

template <class Matrix>
void gru_step_impl(std::span<float> state, const Matrix& recurrent, std::span<const float> input_contrib,
                   std::span<const float> recurrent_bias, std::span<float> scratch)
{
  const std::size_t n3 = 3 * state.size();
  check(recurrent.rows() == static_cast<int>(n3) && recurrent.cols() == static_cast<int>(state.size()), [&] { return std::string("GRU recurrent matrix shape mismatch"); });
  check(recurrent_bias.size() == n3, [&] { return std::string("GRU recurrent bias size " + dims(recurrent_bias.size(), n3)); });
  check(scratch.size() >= n3, [&] { return std::string("GRU scratch too small"); });
  auto g = scratch.first(n3);
  std::copy(recurrent_bias.begin(), recurrent_bias.end(), g.begin());
  recurrent.matvec_accumulate(state, g);
  gru_update(state, input_contrib, g);
}

} // namespace

void gru_step(std::span<float> state, const BlockSparseMatrix& recurrent, std::span<const float> input_contrib,
              std::span<const float> recurrent_bias, std::span<float> scratch)
{
  gru_step_impl(state, recurrent, input_contrib, recurrent_bias, scratch);
}

void gru_step(std::span<float> state, const DenseMatrix& recurrent, std::span<const float> input_contrib,
              std::span<const float> recurrent_bias, std::span<float> scratch)
{
  gru_step_impl(state, recurrent, input_contrib, recurrent_bias, scratch);
}

void DualFc::validate() const
{
  require(w1.rows() == w2.rows() && w1.cols() == w2.cols(), "dual FC branch shapes differ");
  require(a1.size() == static_cast<std::size_t>(w1.rows()) && a2.size() == static_cast<std::size_t>(w1.rows()),
          "dual FC scale size mismatch");
}

void DualFc::forward(std::span<const float> c, std::span<float> logits, std::span<float> scratch) const
{
  const std::size_t k = static_cast<std::size_t>(outputs());
  check(c.size() == static_cast<std::size_t>(inputs()), [&] { return std::string("dual FC input size " + dims(c.size(), inputs())); });
  check(logits.size() == k, [&] { return std::string("dual FC output size " + dims(logits.size(), k)); });
  check(scratch.size() >= 2 * k, [&] { return std::string("dual FC scratch too small"); });
  auto b1 = scratch.first(k);
  auto b2 = scratch.subspan(k, k);
  std::fill(b1.begin(), b1.end(), 0.0f);
  std::fill(b2.begin(), b2.end(), 0.0f);
  w1.matvec_accumulate(c, b1);
  w2.matvec_accumulate(c, b2);
  tanh_inplace(b1);
  tanh_inplace(b2);
  const float* s1 = a1.data();
  const float* s2 = a2.data();
  for (std::size_t i = 0; i < k; ++i)
    logits[i] = s1[i] * b1[i] + s2[i] * b2[i];
}

EmbeddingTable::EmbeddingTable(int codes, int width, std::vector<float> values)
: num_codes(codes)
, dim(width)
, rows(values.begin(), values.end())
{
  require(codes > 0 && width > 0, "embedding table needs positive dimensions");
  require(rows.size() == static_cast<std::size_t>(codes) * static_cast<std::size_t>(width),
          "embedding payload size mismatch");
}

std::span<const float> EmbeddingTable::lookup(int code) const
{
  require(code >= 0 && code < num_codes,
          "embedding code " + std::to_string(code) + " outside [0, " + std::to_string(num_codes) + ")");
  return row(code);
}

std::vector<InputLookupTable> precompute_input_tables(const DenseMatrix& input_weights,
                                                      std::span<const EmbeddingTable* const> embeddings)
{
  int total = 0;
  for (const EmbeddingTable* emb : embeddings)
  {
    require(emb != nullptr, "null embedding table");
    total += emb->dim;
  }
  require(total == input_weights.cols(), "input weights have " + std::to_string(input_weights.cols()) +
                                           " columns, embeddings cover " + std::to_string(total));
  std::vector<InputLookupTable> tables;
  tables.reserve(embeddings.size());
  int first_col = 0;
  for (const EmbeddingTable* emb : embeddings)
  {
    InputLookupTable t;
    t.num_codes = emb->num_codes;
    t.width = input_weights.rows();
    t.rows.assign(static_cast<std::size_t>(t.num_codes) * static_cast<std::size_t>(t.width), 0.0f);
    for (int code = 0; code < emb->num_codes; ++code)
    {
      std::span<float> out{t.rows.data() + static_cast<std::size_t>(code) * t.width, static_cast<std::size_t>(t.width)};
      input_weights.matvec_accumulate_columns(first_col, emb->row(code), out);
    }
    first_col += emb->dim;
    tables.push_back(std::move(t));
  }
  return tables;
}

} // namespace blpc
