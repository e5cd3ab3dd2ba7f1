#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense matrix over GF(2). Each row is a bit mask, so at most 64 columns.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols);

  static BitMatrix identity(int n);
  static BitMatrix from_rows(std::vector<uint64_t> rows, int cols);
  // One string per row, e.g. {"011", "101", "110"}.
  static BitMatrix from_strings(const std::vector<std::string>& rows);

  int rows() const { return static_cast<int>(row_.size()); }
  int cols() const { return cols_; }

  bool get(int r, int c) const;
  void set(int r, int c, bool value);
  uint64_t row(int r) const { return row_.at(r); }
  uint64_t& row_ref(int r) { return row_.at(r); }
  const std::vector<uint64_t>& row_data() const { return row_; }

  void append_row(uint64_t bits = 0);
  void remove_row(int r);
  // Appends a column on the right; bits[i] is the entry of row i.
  void append_col(uint64_t col_bits);
  // Removes column c, shifting higher columns down by one.
  void remove_col(int c);

  BitMatrix transposed() const;
  BitMatrix submatrix_cols(uint64_t col_mask) const;

  bool is_zero() const;
  bool is_symmetric() const;
  void xor_in(const BitMatrix& other);
  void zero_diagonal();

  std::string to_string() const;

  bool operator==(const BitMatrix&) const = default;

 private:
  std::vector<uint64_t> row_;
  int cols_ = 0;
};

// Rank over GF(2) of a list of bit-packed rows.
int gf2_rank(const std::vector<uint64_t>& rows);
int gf2_rank(const BitMatrix& m);

// Reduced row echelon form with zero rows dropped; canonical for the row space.
BitMatrix gf2_rref(const BitMatrix& m);

// Basis of the intersection of two row spaces (Zassenhaus).
std::vector<uint64_t> gf2_rowspace_intersection(const std::vector<uint64_t>& a,
                                                const std::vector<uint64_t>& b,
                                                int cols);

// Inverse of a nonsingular square matrix; throws Error if singular.
BitMatrix gf2_inverse(const BitMatrix& m);

BitMatrix gf2_multiply(const BitMatrix& a, const BitMatrix& b);

}  // namespace vmc
