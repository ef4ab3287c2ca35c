#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fsikit/sparse.hpp"
#include "oracles.hpp"

using namespace fsi;

namespace {

// Random sparse SPD block (diagonally dominant) plus a saddle bordering row,
// mimicking the mean-pressure constraint.
SparseMatrix random_spd(int n, oracle::Rng& rng) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    double diag = 4.0;
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
      if (i == j) continue;
      double v = rng.uniform(-0.5, 0.5);
      t.push_back({i, j, v});
      t.push_back({j, i, v});
      diag += std::abs(v);
    }
    t.push_back({i, i, diag});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace

TEST_SUITE_BEGIN("sparse");

TEST_CASE("from_triplets sums duplicates and sorts columns") {
  std::vector<Triplet> t = {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5},
                            {1, 1, 3.0}, {1, 0, -1.0}};
  SparseMatrix a = SparseMatrix::from_triplets(2, 3, std::move(t));
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  CHECK(a.nnz() == 4);
  CHECK(a.coeff(0, 2) == 1.5);
  CHECK(a.coeff(0, 0) == 2.0);
  CHECK(a.coeff(0, 1) == 0.0);
  // CSR invariant: strictly increasing column indices per row.
  const auto& off = a.row_offsets();
  for (int i = 0; i < a.rows(); ++i)
    for (int k = off[i] + 1; k < off[i + 1]; ++k)
      CHECK(a.col_indices()[k - 1] < a.col_indices()[k]);
}

TEST_CASE("apply, transpose, bilinear against dense") {
  oracle::Rng rng(11);
  std::vector<Triplet> t;
  for (int k = 0; k < 40; ++k)
    t.push_back({static_cast<int>(rng.uniform(0, 6)),
                 static_cast<int>(rng.uniform(0, 5)), rng.uniform(-2, 2)});
  SparseMatrix a = SparseMatrix::from_triplets(6, 5, std::move(t));
  auto d = oracle::dense(a);
  std::vector<double> x = rng.vector(5), y = rng.vector(6);

  std::vector<double> ax = a.apply(x);
  for (int i = 0; i < 6; ++i) {
    double s = 0.0;
    for (int j = 0; j < 5; ++j) s += d[i][j] * x[j];
    CHECK(ax[i] == doctest::Approx(s).epsilon(1e-14));
  }
  std::vector<double> aty = a.apply_transposed(y);
  for (int j = 0; j < 5; ++j) {
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += d[i][j] * y[i];
    CHECK(aty[j] == doctest::Approx(s).epsilon(1e-14));
  }
  double b = a.bilinear(y, x);
  double bd = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j) bd += y[i] * d[i][j] * x[j];
  CHECK(b == doctest::Approx(bd).epsilon(1e-13));

  // transposed() and scaled() round trips
  CHECK(oracle::max_abs_diff(oracle::dense(a.transposed().transposed()), d) == 0.0);
  auto s2 = oracle::dense(a.scaled(-2.0));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j) CHECK(s2[i][j] == -2.0 * d[i][j]);
}

TEST_CASE("block layout bookkeeping") {
  BlockLayout lay = BlockLayout::make({"u", "p", "xi"}, {4, 3, 1});
  CHECK(lay.total() == 8);
  CHECK(lay.offset(0) == 0);
  CHECK(lay.offset(1) == 4);
  CHECK(lay.offset(2) == 7);
  CHECK(lay.block_of(0) == 0);
  CHECK(lay.block_of(5) == 1);
  CHECK(lay.name_of(7) == "xi");
}

TEST_CASE("block compose matches dense saddle layout") {
  oracle::Rng rng(5);
  SparseMatrix a = random_spd(4, rng);
  std::vector<Triplet> bt;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) bt.push_back({i, j, rng.uniform(-1, 1)});
  SparseMatrix b = SparseMatrix::from_triplets(2, 4, std::move(bt));

  BlockSystem sys(BlockLayout::make({"a", "b"}, {4, 2}));
  sys.set(0, 0, &a);
  sys.set(0, 1, &b, -1.0, true);  // -B^T
  sys.set(1, 0, &b);
  SparseMatrix g = sys.assemble();
  REQUIRE(g.rows() == 6);

  auto da = oracle::dense(a), db = oracle::dense(b), dg = oracle::dense(g);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(dg[i][j] == da[i][j]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(dg[4 + i][j] == db[i][j]);
      CHECK(dg[j][4 + i] == -db[i][j]);  // negation tag == scale then transpose
    }
  // Zero block stays structurally absent.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(g.coeff(4 + i, 4 + j) == 0.0);
}

TEST_CASE("row and column vector blocks") {
  SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  std::vector<double> m = {0.5, 0.25};
  BlockSystem sys(BlockLayout::make({"p", "xi"}, {2, 1}));
  sys.set(0, 0, &a);
  sys.set_row_vector(1, 0, &m);
  sys.set_column_vector(0, 1, &m, 2.0);
  SparseMatrix g = sys.assemble();
  CHECK(g.coeff(2, 0) == 0.5);
  CHECK(g.coeff(2, 1) == 0.25);
  CHECK(g.coeff(0, 2) == 1.0);
  CHECK(g.coeff(1, 2) == 0.5);
}

TEST_CASE("block shape mismatch is a composition error") {
  SparseMatrix a = SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}});
  BlockSystem sys(BlockLayout::make({"u", "p"}, {2, 1}));
  sys.set(0, 0, &a);
  CHECK_THROWS_AS(sys.assemble(), SolverError);
  CHECK_THROWS_WITH_AS(sys.assemble(),
                       doctest::Contains("shape mismatch"), SolverError);
}

TEST_CASE("factorize: identity and 2x2 hand case") {
  SparseMatrix id = SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 1.0},
                                                       {2, 2, 1.0}});
  Factorization f = factorize(id);
  std::vector<double> b = {1.5, -2.0, 0.25};
  CHECK(f.solve(b) == b);

  SparseMatrix a = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  std::vector<double> x = factorize(a).solve({1.0, 1.0});
  CHECK(x[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("random 200x200 SPD plus saddle bordering: residual <= 1e-10") {
  oracle::Rng rng(99);
  const int n = 200;
  SparseMatrix a = random_spd(n, rng);
  std::vector<double> border = rng.vector(n, 0.1, 1.0);
  BlockSystem sys(BlockLayout::make({"core", "mult"}, {n, 1}));
  sys.set(0, 0, &a);
  sys.set_row_vector(1, 0, &border);
  sys.set_column_vector(0, 1, &border);
  SparseMatrix g = sys.assemble();
  Factorization f = factorize(g);
  std::vector<double> b = rng.vector(n + 1);
  std::vector<double> x = f.solve(b);
  CHECK(relative_residual(g, x, b) <= 1e-10);
}

TEST_CASE("solve: linearity and independence of repeated solves") {
  oracle::Rng rng(123);
  SparseMatrix a = random_spd(30, rng);
  Factorization f = factorize(a);
  std::vector<double> b1 = rng.vector(30), b2 = rng.vector(30);
  std::vector<double> x1 = f.solve(b1), x2 = f.solve(b2);
  // bit-identical repeat (factorization reuse determinism)
  CHECK(f.solve(b1) == x1);
  std::vector<double> bsum(30), xsum = f.solve([&] {
    for (int i = 0; i < 30; ++i) bsum[i] = b1[i] + b2[i];
    return bsum;
  }());
  double scale = 0.0, diff = 0.0;
  for (int i = 0; i < 30; ++i) {
    scale = std::max(scale, std::abs(xsum[i]));
    diff = std::max(diff, std::abs(xsum[i] - x1[i] - x2[i]));
  }
  CHECK(diff <= 1e-12 * scale);
}

TEST_CASE("singularity diagnostics name the offending block") {
  // Zero diagonal block with no coupling: structurally singular.
  SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  SparseMatrix zero = SparseMatrix::from_triplets(2, 2, {});
  BlockLayout lay = BlockLayout::make({"velocity", "pressure"}, {2, 2});
  BlockSystem sys(lay);
  sys.set(0, 0, &a);
  sys.set(1, 1, &zero);
  SparseMatrix g = sys.assemble();
  CHECK_THROWS_AS(factorize(g, &lay), SolverError);
  try {
    factorize(g, &lay);
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("pressure") != std::string::npos);
  }
}

TEST_CASE("relative residual definition") {
  SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {1, 1, 4.0}});
  std::vector<double> x = {1.0, 1.0};
  // A x = (2, 4); against b = (2, 0): ||r|| = 4, ||b|| = 2.
  CHECK(relative_residual(a, x, {2.0, 0.0}) == doctest::Approx(2.0));
  CHECK(relative_residual(a, x, {2.0, 4.0}) == 0.0);
}

TEST_SUITE_END();
