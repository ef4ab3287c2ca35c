#include "fsikit/sparse.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace fsi {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
                           std::vector<int> col_indices,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (rows_ < 0 || cols_ < 0 ||
      row_offsets_.size() != static_cast<size_t>(rows_) + 1 ||
      row_offsets_.front() != 0 ||
      row_offsets_.back() != static_cast<int>(values_.size()) ||
      col_indices_.size() != values_.size())
    throw SolverError("sparse: inconsistent CSR arrays");
  for (int i = 0; i < rows_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1])
      throw SolverError("sparse: row offsets not monotone");
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] < 0 || col_indices_[k] >= cols_)
        throw SolverError("sparse: column index out of range");
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
        throw SolverError("sparse: column indices not strictly increasing");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<Triplet> t) {
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int> offsets(rows + 1, 0);
  std::vector<int> cols_idx;
  std::vector<double> vals;
  cols_idx.reserve(t.size());
  vals.reserve(t.size());
  for (size_t k = 0; k < t.size();) {
    int r = t[k].row, c = t[k].col;
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw SolverError("sparse: triplet index out of range");
    double v = 0.0;
    while (k < t.size() && t[k].row == r && t[k].col == c) v += t[k++].value;
    cols_idx.push_back(c);
    vals.push_back(v);
    offsets[r + 1] = static_cast<int>(vals.size());
  }
  for (int r = 0; r < rows; ++r) offsets[r + 1] = std::max(offsets[r + 1], offsets[r]);
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_idx),
                      std::move(vals));
}

std::vector<double> SparseMatrix::apply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != cols_)
    throw SolverError("sparse: apply size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      s += values_[k] * x[col_indices_[k]];
    y[i] = s;
  }
  return y;
}

std::vector<double> SparseMatrix::apply_transposed(
    const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != rows_)
    throw SolverError("sparse: apply_transposed size mismatch");
  std::vector<double> y(cols_, 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      y[col_indices_[k]] += values_[k] * x[i];
  return y;
}

double SparseMatrix::bilinear(const std::vector<double>& x,
                              const std::vector<double>& y) const {
  if (static_cast<int>(x.size()) != rows_ ||
      static_cast<int>(y.size()) != cols_)
    throw SolverError("sparse: bilinear size mismatch");
  double s = 0.0;
  for (int i = 0; i < rows_; ++i) {
    double row = 0.0;
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      row += values_[k] * y[col_indices_[k]];
    s += x[i] * row;
  }
  return s;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<int> offsets(cols_ + 1, 0);
  for (int c : col_indices_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<int> cols_idx(values_.size());
  std::vector<double> vals(values_.size());
  std::vector<int> next(offsets.begin(), offsets.end() - 1);
  for (int i = 0; i < rows_; ++i)
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      int dst = next[col_indices_[k]]++;
      cols_idx[dst] = i;
      vals[dst] = values_[k];
    }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols_idx),
                      std::move(vals));
}

SparseMatrix SparseMatrix::scaled(double s) const {
  SparseMatrix r = *this;
  for (double& v : r.values_) v *= s;
  return r;
}

double SparseMatrix::coeff(int row, int col) const {
  for (int k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k)
    if (col_indices_[k] == col) return values_[k];
  return 0.0;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw SolverError("sparse: add shape mismatch");
  std::vector<int> offsets(a.rows() + 1, 0);
  std::vector<int> cols_idx;
  std::vector<double> vals;
  cols_idx.reserve(a.nnz() + b.nnz());
  vals.reserve(a.nnz() + b.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    int ka = a.row_offsets()[i], ea = a.row_offsets()[i + 1];
    int kb = b.row_offsets()[i], eb = b.row_offsets()[i + 1];
    while (ka < ea || kb < eb) {
      int ca = ka < ea ? a.col_indices()[ka] : a.cols();
      int cb = kb < eb ? b.col_indices()[kb] : a.cols();
      if (ca < cb) {
        cols_idx.push_back(ca);
        vals.push_back(a.values()[ka++]);
      } else if (cb < ca) {
        cols_idx.push_back(cb);
        vals.push_back(b.values()[kb++]);
      } else {
        cols_idx.push_back(ca);
        vals.push_back(a.values()[ka++] + b.values()[kb++]);
      }
    }
    offsets[i + 1] = static_cast<int>(vals.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets),
                      std::move(cols_idx), std::move(vals));
}

BlockLayout BlockLayout::make(std::vector<std::string> names,
                              std::vector<int> sizes) {
  BlockLayout l;
  l.names = std::move(names);
  l.sizes = std::move(sizes);
  l.offsets.resize(l.sizes.size() + 1, 0);
  for (size_t b = 0; b < l.sizes.size(); ++b)
    l.offsets[b + 1] = l.offsets[b] + l.sizes[b];
  return l;
}

int BlockLayout::block_of(int g) const {
  for (size_t b = 0; b < sizes.size(); ++b)
    if (g < offsets[b + 1]) return static_cast<int>(b);
  return static_cast<int>(sizes.size()) - 1;
}

const std::string& BlockLayout::name_of(int g) const {
  return names[block_of(g)];
}

BlockSystem::BlockSystem(BlockLayout layout) : layout_(std::move(layout)) {}

void BlockSystem::set(int bi, int bj, const SparseMatrix* m, double scale,
                      bool transpose) {
  entries_.push_back({bi, bj, m, nullptr, scale, transpose, false});
}

void BlockSystem::set_column_vector(int bi, int bj,
                                    const std::vector<double>* v,
                                    double scale) {
  entries_.push_back({bi, bj, nullptr, v, scale, false, true});
}

void BlockSystem::set_row_vector(int bi, int bj, const std::vector<double>* v,
                                 double scale) {
  entries_.push_back({bi, bj, nullptr, v, scale, false, false});
}

SparseMatrix BlockSystem::assemble() const {
  std::vector<Triplet> t;
  size_t nnz = 0;
  for (const Entry& e : entries_)
    nnz += e.m ? static_cast<size_t>(e.m->nnz()) : e.vec->size();
  t.reserve(nnz);
  for (const Entry& e : entries_) {
    int ro = layout_.offset(e.bi), co = layout_.offset(e.bj);
    if (e.m) {
      int expected_rows = e.transpose ? e.m->cols() : e.m->rows();
      int expected_cols = e.transpose ? e.m->rows() : e.m->cols();
      if (expected_rows != layout_.sizes[e.bi] ||
          expected_cols != layout_.sizes[e.bj])
        throw SolverError("block system: block '" + layout_.names[e.bi] +
                          "'/'" + layout_.names[e.bj] + "' shape mismatch");
      const auto& off = e.m->row_offsets();
      for (int i = 0; i < e.m->rows(); ++i)
        for (int k = off[i]; k < off[i + 1]; ++k) {
          int r = e.transpose ? e.m->col_indices()[k] : i;
          int c = e.transpose ? i : e.m->col_indices()[k];
          t.push_back({ro + r, co + c, e.scale * e.m->values()[k]});
        }
    } else {
      int n = static_cast<int>(e.vec->size());
      int expected = e.vec_is_column ? layout_.sizes[e.bi] : layout_.sizes[e.bj];
      int thin = e.vec_is_column ? layout_.sizes[e.bj] : layout_.sizes[e.bi];
      if (n != expected || thin != 1)
        throw SolverError("block system: vector block shape mismatch");
      for (int i = 0; i < n; ++i) {
        double v = (*e.vec)[i];
        if (v == 0.0) continue;
        if (e.vec_is_column)
          t.push_back({ro + i, co, e.scale * v});
        else
          t.push_back({ro, co + i, e.scale * v});
      }
    }
  }
  return SparseMatrix::from_triplets(layout_.total(), layout_.total(),
                                     std::move(t));
}

struct Factorization::Impl {
  Eigen::SparseMatrix<double> a;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

Factorization::Factorization() = default;
Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

int Factorization::size() const {
  return impl_ ? static_cast<int>(impl_->a.rows()) : 0;
}

std::vector<double> Factorization::solve(const std::vector<double>& rhs) const {
  if (!impl_) throw SolverError("solve: factorization is empty");
  if (static_cast<int>(rhs.size()) != impl_->a.rows())
    throw SolverError("solve: rhs size mismatch");
  Eigen::VectorXd b =
      Eigen::Map<const Eigen::VectorXd>(rhs.data(), rhs.size());
  Eigen::VectorXd x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success)
    throw SolverError("solve: back substitution failed");
  return std::vector<double>(x.data(), x.data() + x.size());
}

Factorization factorize(const SparseMatrix& a, const BlockLayout* layout) {
  if (a.rows() != a.cols()) throw SolverError("factorize: matrix not square");
  auto block_hint = [&](int idx, const char* what) -> std::string {
    std::string msg = std::string("factorize: ") + what + " " +
                      std::to_string(idx);
    if (layout)
      msg += " (block '" + layout->name_of(idx) +
             "', local index " +
             std::to_string(idx - layout->offset(layout->block_of(idx))) + ")";
    return msg;
  };

  // Structural singularity is diagnosed up front: an empty row or column
  // pinpoints the forgotten block (e.g. a missing mean-pressure constraint
  // or an empty coupling).
  std::vector<char> col_seen(a.cols(), 0);
  for (int i = 0; i < a.rows(); ++i) {
    bool any = false;
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      if (a.values()[k] != 0.0) {
        any = true;
        col_seen[a.col_indices()[k]] = 1;
      }
    }
    if (!any) throw SolverError(block_hint(i, "structurally empty row"));
  }
  for (int c = 0; c < a.cols(); ++c)
    if (!col_seen[c])
      throw SolverError(block_hint(c, "structurally empty column"));

  Factorization f;
  f.impl_ = std::make_unique<Factorization::Impl>();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(a.nnz());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
      trips.emplace_back(i, a.col_indices()[k], a.values()[k]);
  f.impl_->a.resize(a.rows(), a.cols());
  f.impl_->a.setFromTriplets(trips.begin(), trips.end());
  f.impl_->a.makeCompressed();
  f.impl_->lu.analyzePattern(f.impl_->a);
  f.impl_->lu.factorize(f.impl_->a);
  if (f.impl_->lu.info() != Eigen::Success) {
    std::string detail = f.impl_->lu.lastErrorMessage();
    std::string msg =
        "factorize: LU failed (" + detail +
        "); likely a singular system, e.g. missing mean-pressure "
        "constraint or an empty coupling block";
    throw SolverError(msg);
  }
  return f;
}

double relative_residual(const SparseMatrix& a, const std::vector<double>& x,
                         const std::vector<double>& b) {
  std::vector<double> ax = a.apply(x);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < b.size(); ++i) {
    double r = ax[i] - b[i];
    num += r * r;
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace fsi
