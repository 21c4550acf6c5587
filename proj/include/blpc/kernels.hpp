#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "blpc/aligned.hpp"

namespace blpc
{

/// Dense matrix kept column-major so that y += M x walks contiguous columns
/// while a tile of y stays in registers (vectorizes without -ffast-math).
class DenseMatrix
{
public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols);

  /// values holds rows*cols entries in row-major order.
  static DenseMatrix from_row_major(int rows, int cols, std::span<const float> values);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  float at(int r, int c) const noexcept { return data_[static_cast<std::size_t>(c) * rows_ + r]; }
  std::span<const float> column(int c) const noexcept
  {
    return {data_.data() + static_cast<std::size_t>(c) * rows_, static_cast<std::size_t>(rows_)};
  }
  std::vector<float> to_row_major() const;

  /// out += M v. Throws Error(invalid_input) on dimension mismatch.
  void matvec_accumulate(std::span<const float> v, std::span<float> out) const;
  /// Same as above restricted to columns [first, first + v.size()).
  void matvec_accumulate_columns(int first, std::span<const float> v, std::span<float> out) const;

private:
  int rows_ = 0;
  int cols_ = 0;
  FloatBuffer data_;
};

constexpr int kBlockRows = 16;

/// Matrix stored as 16x1 column blocks: each block covers rows
/// [16*row_block, 16*row_block + 16) of one column.
class BlockSparseMatrix
{
public:
  struct Block
  {
    std::uint32_t row_block = 0;
    std::uint32_t col = 0;
    std::array<float, kBlockRows> values{};
  };

  BlockSparseMatrix() = default;

  /// Throws Error(invalid_input) if rows is not a multiple of 16, a block lies
  /// outside the matrix, or two blocks share coordinates.
  static BlockSparseMatrix from_blocks(int rows, int cols, std::vector<Block> blocks);
  /// Keeps every 16x1 block that has at least one nonzero value.
  static BlockSparseMatrix from_dense_row_major(int rows, int cols, std::span<const float> values);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t nonzero_blocks() const noexcept { return cols_idx_.size(); }

  /// Blocks sorted by (row_block, col).
  std::vector<Block> blocks() const;
  std::vector<float> densify() const;

  /// Fraction of blocks present within each of `groups` equal horizontal slices
  /// (the three GRU gates for a recurrent matrix).
  std::vector<double> group_density(int groups) const;
  std::vector<std::size_t> group_block_counts(int groups) const;

  /// out += M v.
  void matvec_accumulate(std::span<const float> v, std::span<float> out) const;

private:
  int rows_ = 0;
  int cols_ = 0;
  // CSR over row blocks.
  std::vector<std::uint32_t> row_ptr_;
  std::vector<std::uint32_t> cols_idx_;
  FloatBuffer values_;
};

/// y = M v for a dense or block-sparse matrix.
std::vector<float> sparse_matvec(const BlockSparseMatrix& m, std::span<const float> v);
std::vector<float> dense_matvec(const DenseMatrix& m, std::span<const float> v);

/// GRU update with gate order (update, reset, candidate):
///   z = sigmoid(x_z + g_z), r = sigmoid(x_r + g_r)
///   h~ = tanh(x_h + r * g_h), h' = z * h + (1 - z) * h~
/// where x = input_contrib (U x + b_in, 3N) and g = recurrent_contrib (W h + b_rec, 3N).
void gru_update(std::span<float> state, std::span<const float> input_contrib, std::span<float> recurrent_contrib);

/// Full GRU step: recurrent product, then gru_update. scratch needs 3N floats.
void gru_step(std::span<float> state, const BlockSparseMatrix& recurrent, std::span<const float> input_contrib,
              std::span<const float> recurrent_bias, std::span<float> scratch);
void gru_step(std::span<float> state, const DenseMatrix& recurrent, std::span<const float> input_contrib,
              std::span<const float> recurrent_bias, std::span<float> scratch);

/// Two-branch projection logits = a1 * tanh(W1 c) + a2 * tanh(W2 c).
struct DualFc
{
  DenseMatrix w1; // K x C
  DenseMatrix w2; // K x C
  FloatBuffer a1;
  FloatBuffer a2;

  int outputs() const noexcept { return w1.rows(); }
  int inputs() const noexcept { return w1.cols(); }
  void validate() const;

  /// scratch needs 2K floats.
  void forward(std::span<const float> c, std::span<float> logits, std::span<float> scratch) const;
};

struct EmbeddingTable
{
  int num_codes = 0;
  int dim = 0;
  FloatBuffer rows; // num_codes x dim, row-major

  EmbeddingTable() = default;
  EmbeddingTable(int codes, int width, std::vector<float> values);

  /// Throws Error(invalid_input) for codes outside [0, num_codes).
  std::span<const float> lookup(int code) const;
  std::span<const float> row(int code) const noexcept
  {
    return {rows.data() + static_cast<std::size_t>(code) * dim, static_cast<std::size_t>(dim)};
  }
};

/// (embedding row) x (input weight column block), one row per code.
struct InputLookupTable
{
  int num_codes = 0;
  int width = 0;
  FloatBuffer rows;

  std::span<const float> row(int code) const noexcept
  {
    return {rows.data() + static_cast<std::size_t>(code) * width, static_cast<std::size_t>(width)};
  }
};

/// Signal j uses columns [j*dim, (j+1)*dim) of `input_weights` and the
/// embedding `embeddings[j]`. Throws Error(invalid_input) unless the embedding
/// widths add up to the column count.
std::vector<InputLookupTable> precompute_input_tables(const DenseMatrix& input_weights,
                                                      std::span<const EmbeddingTable* const> embeddings);

/// out += row, element-wise.
inline void add_row(std::span<const float> row, std::span<float> out) noexcept
{
  const float* src = row.data();
  float* dst = out.data();
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i)
    dst[i] += src[i];
}

} // namespace blpc
