#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fsikit/errors.hpp"

namespace fsi {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Compressed-row matrix. Column indices are strictly increasing within each
// row and duplicates are summed on construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
               std::vector<int> col_indices, std::vector<double> values);
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<Triplet> triplets);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // y = A x
  std::vector<double> apply(const std::vector<double>& x) const;
  // y = A^T x
  std::vector<double> apply_transposed(const std::vector<double>& x) const;
  // x^T A y (sizes rows() and cols())
  double bilinear(const std::vector<double>& x,
                  const std::vector<double>& y) const;
  // x^T A x for square A
  double quadratic(const std::vector<double>& x) const { return bilinear(x, x); }

  SparseMatrix transposed() const;
  SparseMatrix scaled(double s) const;
  double coeff(int row, int col) const;  // 0 if not stored

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);

// Named block layout of a composed system; used to map global indices back
// to blocks in diagnostics and error messages.
struct BlockLayout {
  std::vector<std::string> names;
  std::vector<int> sizes;
  std::vector<int> offsets;  // computed; offsets.back() == total

  static BlockLayout make(std::vector<std::string> names,
                          std::vector<int> sizes);
  int total() const { return offsets.back(); }
  int offset(int b) const { return offsets[b]; }
  int block_of(int global_index) const;
  const std::string& name_of(int global_index) const;
};

// Square block system assembled from sparse blocks, each optionally
// transposed and scaled. Blocks set twice overwrite.
class BlockSystem {
 public:
  explicit BlockSystem(BlockLayout layout);

  void set(int block_row, int block_col, const SparseMatrix* m,
           double scale = 1.0, bool transpose = false);
  // Single sparse column/row vectors (e.g. the mean-pressure constraint).
  void set_column_vector(int block_row, int block_col,
                         const std::vector<double>* v, double scale = 1.0);
  void set_row_vector(int block_row, int block_col,
                      const std::vector<double>* v, double scale = 1.0);

  SparseMatrix assemble() const;
  const BlockLayout& layout() const { return layout_; }

 private:
  struct Entry {
    int bi, bj;
    const SparseMatrix* m = nullptr;
    const std::vector<double>* vec = nullptr;
    double scale = 1.0;
    bool transpose = false;
    bool vec_is_column = false;
  };
  BlockLayout layout_;
  std::vector<Entry> entries_;
};

// Direct sparse LU with pivoting.
class Factorization {
 public:
  Factorization();
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  std::vector<double> solve(const std::vector<double>& rhs) const;
  int size() const;

 private:
  friend Factorization factorize(const SparseMatrix&, const BlockLayout*);
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Throws SolverError on structural or numerical singularity; when a layout is
// given the message names the offending block.
Factorization factorize(const SparseMatrix& a,
                        const BlockLayout* layout = nullptr);

// ||A x - b|| / max(||b||, tiny)
double relative_residual(const SparseMatrix& a, const std::vector<double>& x,
                         const std::vector<double>& b);

}  // namespace fsi
