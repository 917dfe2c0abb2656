#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cecdpop/error.hpp"

namespace cecdpop {

// Boolean matrix of allowable value pairs between two variables. Row u and
// column v refer to positions in the (possibly pruned) domains of the row and
// column variables. Rows are packed into 64-bit words so that the boolean
// product is a sequence of row ORs.
class ConsistencyMatrix {
 public:
  ConsistencyMatrix() = default;

  ConsistencyMatrix(std::size_t rows, std::size_t cols, bool fill = false)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64),
        bits_(rows * words_, 0) {
    if (fill) {
      for (std::size_t r = 0; r < rows_; ++r) set_row_ones(r);
    }
  }

  // Row-major 0/1 literal, mostly for tests.
  ConsistencyMatrix(std::initializer_list<std::initializer_list<int>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    words_ = (cols_ + 63) / 64;
    bits_.assign(rows_ * words_, 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionMismatch("ragged matrix literal");
      std::size_t c = 0;
      for (int bit : row) set(r, c++, bit != 0);
      ++r;
    }
  }

  static ConsistencyMatrix identity(std::size_t n) {
    ConsistencyMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  static ConsistencyMatrix ones(std::size_t rows, std::size_t cols) {
    return ConsistencyMatrix(rows, cols, true);
  }

  static ConsistencyMatrix zeros(std::size_t rows, std::size_t cols) {
    return ConsistencyMatrix(rows, cols, false);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t entries() const { return rows_ * cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (bits_[r * words_ + c / 64] >> (c % 64)) & 1U;
  }

  void set(std::size_t r, std::size_t c, bool value) {
    auto& word = bits_[r * words_ + c / 64];
    const std::uint64_t mask = std::uint64_t{1} << (c % 64);
    word = value ? (word | mask) : (word & ~mask);
  }

  bool row_empty(std::size_t r) const {
    for (std::size_t w = 0; w < words_; ++w) {
      if (bits_[r * words_ + w] != 0) return false;
    }
    return true;
  }

  bool col_empty(std::size_t c) const {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (get(r, c)) return false;
    }
    return true;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto word : bits_) n += static_cast<std::size_t>(std::popcount(word));
    return n;
  }

  bool all_ones() const { return count() == entries(); }

  // Keeps only the listed rows and columns, in the given order.
  ConsistencyMatrix submatrix(const std::vector<std::size_t>& keep_rows,
                              const std::vector<std::size_t>& keep_cols) const {
    ConsistencyMatrix out(keep_rows.size(), keep_cols.size());
    for (std::size_t r = 0; r < keep_rows.size(); ++r) {
      for (std::size_t c = 0; c < keep_cols.size(); ++c) {
        out.set(r, c, get(keep_rows[r], keep_cols[c]));
      }
    }
    return out;
  }

  void erase_row(std::size_t r) {
    bits_.erase(bits_.begin() + static_cast<std::ptrdiff_t>(r * words_),
                bits_.begin() + static_cast<std::ptrdiff_t>((r + 1) * words_));
    --rows_;
  }

  void erase_col(std::size_t c) {
    std::vector<std::size_t> keep_rows(rows_);
    std::vector<std::size_t> keep_cols;
    for (std::size_t r = 0; r < rows_; ++r) keep_rows[r] = r;
    for (std::size_t k = 0; k < cols_; ++k) {
      if (k != c) keep_cols.push_back(k);
    }
    *this = submatrix(keep_rows, keep_cols);
  }

  // Printable grid with row/column labels, one row per line.
  std::string to_grid(const std::vector<int>& row_labels,
                      const std::vector<int>& col_labels) const {
    std::ostringstream os;
    os << "  ";
    for (std::size_t c = 0; c < cols_; ++c) {
      os << ' ' << (c < col_labels.size() ? col_labels[c] : static_cast<int>(c));
    }
    os << '\n';
    for (std::size_t r = 0; r < rows_; ++r) {
      os << (r < row_labels.size() ? row_labels[r] : static_cast<int>(r)) << ' ';
      for (std::size_t c = 0; c < cols_; ++c) os << ' ' << (get(r, c) ? 1 : 0);
      os << '\n';
    }
    return os.str();
  }

  std::string to_grid() const { return to_grid({}, {}); }

  friend bool operator==(const ConsistencyMatrix& a, const ConsistencyMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.bits_ == b.bits_;
  }

 private:
  friend ConsistencyMatrix bool_matmul(const ConsistencyMatrix&, const ConsistencyMatrix&);
  friend ConsistencyMatrix hadamard(const ConsistencyMatrix&, const ConsistencyMatrix&);

  void set_row_ones(std::size_t r) {
    for (std::size_t w = 0; w < words_; ++w) {
      const std::size_t used = std::min<std::size_t>(64, cols_ - w * 64);
      bits_[r * words_ + w] = used == 64 ? ~std::uint64_t{0}
                                         : ((std::uint64_t{1} << used) - 1);
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Reachability composition: out(u,w) = OR_v a(u,v) AND b(v,w).
inline ConsistencyMatrix bool_matmul(const ConsistencyMatrix& a, const ConsistencyMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("bool_matmul: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " by " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()));
  }
  ConsistencyMatrix out(a.rows(), b.cols());
  for (std::size_t u = 0; u < a.rows(); ++u) {
    for (std::size_t v = 0; v < a.cols(); ++v) {
      if (!a.get(u, v)) continue;
      for (std::size_t w = 0; w < out.words_; ++w) {
        out.bits_[u * out.words_ + w] |= b.bits_[v * b.words_ + w];
      }
    }
  }
  return out;
}

inline ConsistencyMatrix hadamard(const ConsistencyMatrix& a, const ConsistencyMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("hadamard: operand shapes differ");
  }
  ConsistencyMatrix out = a;
  for (std::size_t i = 0; i < out.bits_.size(); ++i) out.bits_[i] &= b.bits_[i];
  return out;
}

inline ConsistencyMatrix transpose(const ConsistencyMatrix& m) {
  ConsistencyMatrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m.get(r, c)) out.set(c, r, true);
    }
  }
  return out;
}

}  // namespace cecdpop
