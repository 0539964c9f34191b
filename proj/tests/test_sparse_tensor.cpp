#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cparls/errors.hpp"
#include "cparls/sparse_tensor.hpp"
#include "oracles.hpp"

using namespace cparls;

TEST(LinearIndex, FirstElementIsZero) {
  std::vector<index_t> shape{2, 3};
  EXPECT_EQ(to_linear(std::vector<index_t>{0, 0}, shape), LinearIndex{0});
}

TEST(LinearIndex, LastElementOfTwoByThree) {
  // One-based (2,3) in a 2x3 shape is linear index 6, i.e. 5 zero-based.
  std::vector<index_t> shape{2, 3};
  EXPECT_EQ(to_linear(std::vector<index_t>{1, 2}, shape), LinearIndex{5});
}

TEST(LinearIndex, ExhaustiveRoundTrip456) {
  std::vector<index_t> shape{4, 5, 6};
  for (std::int64_t i = 0; i < 120; ++i) {
    auto multi = oracle::unlin(i, shape);
    EXPECT_EQ(to_linear(multi, shape), static_cast<LinearIndex>(i));
    EXPECT_EQ(from_linear(static_cast<LinearIndex>(i), shape), multi);
  }
}

TEST(LinearIndex, RandomShapesRoundTrip) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> order_dist(1, 5);
    std::vector<index_t> shape(order_dist(rng));
    std::int64_t n = 1;
    for (auto& s : shape) {
      std::uniform_int_distribution<index_t> size(1, 15);
      s = size(rng);
      n *= s;
    }
    ASSERT_LE(n, 1'000'000);
    for (int q = 0; q < 500; ++q) {
      std::vector<index_t> multi(shape.size());
      for (std::size_t k = 0; k < shape.size(); ++k) multi[k] = std::uniform_int_distribution<index_t>(0, shape[k] - 1)(rng);
      EXPECT_EQ(from_linear(to_linear(multi, shape), shape), multi);
    }
  }
}

TEST(LinearIndex, OutOfRangeComponentThrows) {
  std::vector<index_t> shape{2, 3};
  EXPECT_THROW(to_linear(std::vector<index_t>{2, 0}, shape), DataError);
  EXPECT_THROW(to_linear(std::vector<index_t>{0, -1}, shape), DataError);
}

TEST(LinearIndex, WideProductsBeyond64Bits) {
  // Shape of a billion-scale FROSTT tensor: the full product exceeds 2^63.
  std::vector<index_t> shape{8'211'298, 176'962, 8'116'559};
  LinearIndex total = checked_product(shape);
  EXPECT_GT(total, static_cast<LinearIndex>(INT64_MAX));
  std::vector<index_t> last{shape[0] - 1, shape[1] - 1, shape[2] - 1};
  EXPECT_EQ(to_linear(last, shape), total - 1);
  EXPECT_EQ(from_linear(total - 1, shape), last);
  EXPECT_EQ(to_string(LinearIndex{1234567890123ULL} * 1000000ULL), "1234567890123000000");
}

TEST(LinearIndex, ProductOverflowThrows) {
  std::vector<index_t> shape(3, INT64_MAX);
  EXPECT_THROW(checked_product(shape), DataError);
}

TEST(Frostt, ParsesSmallTensor) {
  std::istringstream in("1 1 1 2.0\n2 3 1 -1.0\n");
  auto res = parse_frostt(in);
  EXPECT_EQ(res.tensor.shape(), (std::vector<index_t>{2, 3, 1}));
  EXPECT_EQ(res.tensor.nnz(), 2u);
  EXPECT_EQ(res.dropped_zeros, 0u);
  EXPECT_EQ(res.tensor.coord(1, 1), 2);
  EXPECT_DOUBLE_EQ(res.tensor.values()[1], -1.0);
}

TEST(Frostt, DropsZeroValuesWithCount) {
  std::istringstream in("1 1 1 0.0\n");
  auto res = parse_frostt(in);
  EXPECT_EQ(res.tensor.nnz(), 0u);
  EXPECT_EQ(res.dropped_zeros, 1u);
  EXPECT_EQ(res.tensor.shape(), (std::vector<index_t>{1, 1, 1}));
}

TEST(Frostt, SkipsCommentsAndBlankLines) {
  std::istringstream in("# header\n\n  1 2 3.5\n# trailing\n2 2 1\n");
  auto res = parse_frostt(in);
  EXPECT_EQ(res.tensor.nnz(), 2u);
  EXPECT_EQ(res.tensor.shape(), (std::vector<index_t>{2, 2}));
}

TEST(Frostt, ShapeOverride) {
  std::istringstream in("1 1 5\n");
  FrosttReadOptions opts;
  opts.shape = std::vector<index_t>{4, 7};
  auto res = parse_frostt(in, opts);
  EXPECT_EQ(res.tensor.shape(), (std::vector<index_t>{4, 7}));

  std::istringstream too_big("5 1 5\n");
  EXPECT_THROW(parse_frostt(too_big, opts), DataError);
}

TEST(Frostt, RejectsMalformedInput) {
  auto fails = [](const std::string& text) {
    std::istringstream in(text);
    EXPECT_THROW(parse_frostt(in), DataError) << text;
  };
  fails("");
  fails("# only a comment\n");
  fails("1 1 1 2.0\n1 1 3.0\n");  // wrong token count
  fails("1 x 1 2.0\n");           // non-numeric coordinate
  fails("1 1 1 abc\n");           // non-numeric value
  fails("0 1 1 2.0\n");           // coordinate below 1
  fails("1 1 1 2.0\n1 1 1 3.0\n");  // duplicate
}

TEST(Frostt, WriteParseRoundTrip) {
  std::mt19937_64 rng(3);
  auto t = oracle::random_tensor({5, 4, 3, 2}, 40, rng);
  std::ostringstream out;
  write_frostt(out, t);
  std::istringstream in(out.str());
  FrosttReadOptions opts;
  opts.shape = t.shape();
  auto back = parse_frostt(in, opts).tensor;
  ASSERT_EQ(back.nnz(), t.nnz());
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    for (int k = 0; k < t.order(); ++k) EXPECT_EQ(back.coord(e, k), t.coord(e, k));
    EXPECT_EQ(back.values()[e], t.values()[e]);
  }
}

TEST(SparseTensor, ConstructorValidates) {
  EXPECT_THROW(SparseTensor({2, 2}, {0, 2}, {1.0}), DataError);
  EXPECT_THROW(SparseTensor({2, 2}, {0, 1}, {0.0}), DataError);
  EXPECT_THROW(SparseTensor({2, 2}, {0, 1, 0, 1}, {1.0, 2.0}), DataError);
  EXPECT_THROW(SparseTensor({2, 2}, {0, 1, 0}, {1.0, 2.0}), DataError);
}

TEST(ModeLinearization, HandEvaluated) {
  // Nonzero at one-based (2,1,3) of a 2x3x4 tensor; over modes (1,2) its
  // linear index is to_linear((2,1),(2,3)) = 2 one-based.
  SparseTensor t({2, 3, 4}, {1, 0, 2}, {5.0});
  t.precompute_mode_linearization();
  ASSERT_EQ(t.mode_linear_indices(2).size(), 1u);
  EXPECT_EQ(t.mode_linear_indices(2)[0], LinearIndex{1});
  for (int k = 0; k < 3; ++k) EXPECT_EQ(t.mode_linear_indices(k).size(), 1u);
}

TEST(ModeLinearization, MatchesRecomputation) {
  std::mt19937_64 rng(11);
  auto t = oracle::random_tensor({6, 5, 7, 3}, 100, rng);
  t.precompute_mode_linearization();
  for (int k = 0; k < t.order(); ++k) {
    auto lin = t.mode_linear_indices(k);
    auto other = t.other_modes_shape(k);
    for (std::size_t e = 0; e < t.nnz(); ++e) {
      std::vector<index_t> rest;
      for (int j = 0; j < t.order(); ++j)
        if (j != k) rest.push_back(t.coord(e, j));
      EXPECT_EQ(static_cast<std::int64_t>(lin[e]), oracle::lin(rest, other));
    }
  }
}

TEST(TnsrSamp, SingleNonzeroHandEvaluated) {
  SparseTensor t({2, 3, 4}, {1, 0, 2}, {5.0});
  t.precompute_mode_linearization();
  std::vector<LinearIndex> idx{1};
  std::vector<double> wgt{0.5};
  auto rows = tnsr_samp(t, 2, idx, wgt);
  EXPECT_EQ(rows.rows, 1);
  EXPECT_EQ(rows.cols, 4);
  ASSERT_EQ(rows.nnz(), 1u);
  EXPECT_EQ(rows.col[0], 2);
  EXPECT_DOUBLE_EQ(rows.val[0], 2.5);
}

TEST(TnsrSamp, EmptyFiberGivesEmptyRow) {
  SparseTensor t({2, 3, 4}, {1, 0, 2}, {5.0});
  t.precompute_mode_linearization();
  std::vector<LinearIndex> idx{0, 1};
  std::vector<double> wgt{1.0, 1.0};
  auto rows = tnsr_samp(t, 2, idx, wgt);
  EXPECT_EQ(rows.row_ptr, (std::vector<std::size_t>{0, 0, 1}));
}

TEST(TnsrSamp, RepeatedIndexGivesScaledCopies) {
  SparseTensor t({2, 3, 4}, {1, 0, 2, 1, 0, 3}, {5.0, -2.0});
  t.precompute_mode_linearization();
  std::vector<LinearIndex> idx{1, 1};
  std::vector<double> wgt{2.0, 3.0};
  auto rows = tnsr_samp(t, 2, idx, wgt);
  ASSERT_EQ(rows.nnz(), 4u);
  EXPECT_DOUBLE_EQ(rows.val[0], 10.0);
  EXPECT_DOUBLE_EQ(rows.val[1], -4.0);
  EXPECT_DOUBLE_EQ(rows.val[2], 15.0);
  EXPECT_DOUBLE_EQ(rows.val[3], -6.0);
}

TEST(TnsrSamp, FullFiberSetReproducesUnfolding) {
  std::mt19937_64 rng(5);
  auto t = oracle::random_tensor({4, 3, 5}, 25, rng);
  t.precompute_mode_linearization();
  auto dense = oracle::densify(t);
  for (int k = 0; k < 3; ++k) {
    auto unfolded = oracle::unfold(dense, t.shape(), k);
    std::vector<LinearIndex> idx;
    for (Eigen::Index j = 0; j < unfolded.cols(); ++j) idx.push_back(static_cast<LinearIndex>(j));
    std::vector<double> wgt(idx.size(), 1.0);
    auto rows = tnsr_samp(t, k, idx, wgt);
    Eigen::MatrixXd got = Eigen::MatrixXd::Zero(rows.rows, rows.cols);
    for (index_t j = 0; j < rows.rows; ++j)
      for (auto p = rows.row_ptr[j]; p < rows.row_ptr[j + 1]; ++p) got(j, rows.col[p]) = rows.val[p];
    EXPECT_TRUE(got.isApprox(unfolded.transpose())) << "mode " << k;
  }
}

TEST(TnsrSamp, ErrorPaths) {
  SparseTensor t({2, 3}, {0, 0}, {1.0});
  std::vector<LinearIndex> idx{0};
  std::vector<double> wgt{1.0};
  EXPECT_THROW(tnsr_samp(t, 0, idx, wgt), std::logic_error);
  t.precompute_mode_linearization();
  EXPECT_THROW(tnsr_samp(t, 2, idx, wgt), std::out_of_range);
}

TEST(FrobNorm, Values) {
  EXPECT_DOUBLE_EQ(frob_norm(SparseTensor({1}, {0}, {3.0})), 3.0);
  EXPECT_DOUBLE_EQ(frob_norm(SparseTensor({2}, {0, 1}, {3.0, 4.0})), 5.0);
  std::mt19937_64 rng(9);
  auto t = oracle::random_tensor({5, 5, 4}, 50, rng);
  double sq = 0.0;
  for (double v : oracle::densify(t)) sq += v * v;
  EXPECT_NEAR(frob_norm(t), std::sqrt(sq), 1e-12 * std::sqrt(sq));
}
