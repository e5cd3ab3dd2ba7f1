#include "vmc/gf2.hpp"

#include <algorithm>
#include <bit>

namespace vmc {

BitMatrix::BitMatrix(int rows, int cols) : row_(rows, 0), cols_(cols) {
  if (rows < 0 || cols < 0 || cols > 64) throw Error("BitMatrix: bad shape");
}

BitMatrix BitMatrix::identity(int n) {
  BitMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.row_[i] = uint64_t{1} << i;
  return m;
}

BitMatrix BitMatrix::from_rows(std::vector<uint64_t> rows, int cols) {
  if (cols < 0 || cols > 64) throw Error("BitMatrix: bad column count");
  BitMatrix m;
  m.row_ = std::move(rows);
  m.cols_ = cols;
  uint64_t mask = cols == 64 ? ~uint64_t{0} : (uint64_t{1} << cols) - 1;
  for (uint64_t r : m.row_)
    if (r & ~mask) throw Error("BitMatrix: row bits outside column range");
  return m;
}

BitMatrix BitMatrix::from_strings(const std::vector<std::string>& rows) {
  int cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  BitMatrix m(static_cast<int>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != cols)
      throw Error("BitMatrix: ragged rows");
    for (int j = 0; j < cols; ++j) {
      char c = rows[i][j];
      if (c != '0' && c != '1') throw Error("BitMatrix: expected 0/1");
      if (c == '1') m.row_[i] |= uint64_t{1} << j;
    }
  }
  return m;
}

bool BitMatrix::get(int r, int c) const {
  if (c < 0 || c >= cols_) throw Error("BitMatrix: column out of range");
  return (row_.at(r) >> c) & 1;
}

void BitMatrix::set(int r, int c, bool value) {
  if (c < 0 || c >= cols_) throw Error("BitMatrix: column out of range");
  if (value)
    row_.at(r) |= uint64_t{1} << c;
  else
    row_.at(r) &= ~(uint64_t{1} << c);
}

void BitMatrix::append_row(uint64_t bits) {
  uint64_t mask = cols_ == 64 ? ~uint64_t{0} : (uint64_t{1} << cols_) - 1;
  if (bits & ~mask) throw Error("BitMatrix: row bits outside column range");
  row_.push_back(bits);
}

void BitMatrix::remove_row(int r) { row_.erase(row_.begin() + r); }

void BitMatrix::append_col(uint64_t col_bits) {
  if (cols_ >= 64) throw Error("BitMatrix: too many columns");
  for (int i = 0; i < rows(); ++i)
    if ((col_bits >> i) & 1) row_[i] |= uint64_t{1} << cols_;
  ++cols_;
}

void BitMatrix::remove_col(int c) {
  if (c < 0 || c >= cols_) throw Error("BitMatrix: column out of range");
  uint64_t low = (uint64_t{1} << c) - 1;
  for (auto& r : row_) r = (r & low) | ((r >> 1) & ~low);
  --cols_;
}

BitMatrix BitMatrix::transposed() const {
  if (rows() > 64) throw Error("BitMatrix: too many rows to transpose");
  BitMatrix t(cols_, rows());
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols_; ++j)
      if (get(i, j)) t.set(j, i, true);
  return t;
}

BitMatrix BitMatrix::submatrix_cols(uint64_t col_mask) const {
  BitMatrix out(rows(), std::popcount(col_mask));
  for (int i = 0; i < rows(); ++i) {
    int k = 0;
    for (int j = 0; j < cols_; ++j)
      if ((col_mask >> j) & 1) {
        if (get(i, j)) out.set(i, k, true);
        ++k;
      }
  }
  return out;
}

bool BitMatrix::is_zero() const {
  for (uint64_t r : row_)
    if (r) return false;
  return true;
}

bool BitMatrix::is_symmetric() const {
  if (rows() != cols_) return false;
  for (int i = 0; i < rows(); ++i)
    for (int j = i + 1; j < cols_; ++j)
      if (get(i, j) != get(j, i)) return false;
  return true;
}

void BitMatrix::xor_in(const BitMatrix& other) {
  if (rows() != other.rows() || cols_ != other.cols_)
    throw Error("BitMatrix: shape mismatch");
  for (int i = 0; i < rows(); ++i) row_[i] ^= other.row_[i];
}

void BitMatrix::zero_diagonal() {
  int n = std::min(rows(), cols_);
  for (int i = 0; i < n; ++i) row_[i] &= ~(uint64_t{1} << i);
}

std::string BitMatrix::to_string() const {
  std::string out;
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < cols_; ++j) out += get(i, j) ? '1' : '0';
    out += '\n';
  }
  return out;
}

int gf2_rank(const std::vector<uint64_t>& rows) {
  std::vector<uint64_t> basis;  // each with a distinct lowest set bit
  for (uint64_t r : rows) {
    for (uint64_t b : basis) {
      uint64_t lead = b & (~b + 1);
      if (r & lead) r ^= b;
    }
    if (r) basis.push_back(r);
  }
  return static_cast<int>(basis.size());
}

int gf2_rank(const BitMatrix& m) { return gf2_rank(m.row_data()); }

BitMatrix gf2_rref(const BitMatrix& m) {
  std::vector<uint64_t> rows = m.row_data();
  int nrows = static_cast<int>(rows.size());
  int r = 0;
  for (int c = 0; c < m.cols() && r < nrows; ++c) {
    int piv = -1;
    for (int i = r; i < nrows; ++i)
      if ((rows[i] >> c) & 1) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[r], rows[piv]);
    for (int i = 0; i < nrows; ++i)
      if (i != r && ((rows[i] >> c) & 1)) rows[i] ^= rows[r];
    ++r;
  }
  rows.resize(r);
  return BitMatrix::from_rows(std::move(rows), m.cols());
}

std::vector<uint64_t> gf2_rowspace_intersection(const std::vector<uint64_t>& a,
                                                const std::vector<uint64_t>& b,
                                                int cols) {
  if (cols > 32) throw Error("gf2_rowspace_intersection: at most 32 columns");
  // Zassenhaus: rows (x | x) for x in a and (y | 0) for y in b, with the left
  // block in the low bits. After echelonizing left-columns-first, rows whose
  // pivot lies in the right block carry a basis of span(a) cap span(b) there.
  std::vector<uint64_t> rows;
  for (uint64_t x : a) rows.push_back(x | (x << cols));
  for (uint64_t y : b) rows.push_back(y);
  std::vector<uint64_t> inter;
  size_t r = 0;
  for (int c = 0; c < 2 * cols && r < rows.size(); ++c) {
    uint64_t bit = uint64_t{1} << c;
    size_t piv = r;
    while (piv < rows.size() && !(rows[piv] & bit)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    for (size_t i = 0; i < rows.size(); ++i)
      if (i != r && (rows[i] & bit)) rows[i] ^= rows[r];
    if (c >= cols) inter.push_back(rows[r] >> cols);
    ++r;
  }
  return inter;
}

BitMatrix gf2_inverse(const BitMatrix& m) {
  if (m.rows() != m.cols()) throw Error("gf2_inverse: not square");
  int n = m.rows();
  std::vector<uint64_t> a = m.row_data();
  std::vector<uint64_t> inv(n);
  for (int i = 0; i < n; ++i) inv[i] = uint64_t{1} << i;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if ((a[i] >> c) & 1) {
        piv = i;
        break;
      }
    if (piv < 0) throw Error("gf2_inverse: singular matrix");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    for (int i = 0; i < n; ++i)
      if (i != c && ((a[i] >> c) & 1)) {
        a[i] ^= a[c];
        inv[i] ^= inv[c];
      }
  }
  return BitMatrix::from_rows(std::move(inv), n);
}

BitMatrix gf2_multiply(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.rows()) throw Error("gf2_multiply: shape mismatch");
  BitMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    uint64_t acc = 0;
    uint64_t arow = a.row(i);
    for (int k = 0; k < a.cols(); ++k)
      if ((arow >> k) & 1) acc ^= b.row(k);
    out.row_ref(i) = acc;
  }
  return out;
}

}  // namespace vmc
