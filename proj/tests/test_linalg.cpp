#include <gtest/gtest.h>

#include <cmath>

#include "landscape/errors.hpp"
#include "landscape/linalg.hpp"

using namespace landscape;

TEST(Rank, DetectsDependentRowsAndColumns) {
  Matrix m(3, 4);
  m << 1, 2, 3, 4, 2, 4, 6, 8, 0, 1, 0, 1;
  EXPECT_EQ(numerical_rank(m), 2);
  EXPECT_FALSE(has_full_rank(m));
  EXPECT_TRUE(has_full_rank(Matrix::Identity(3, 3)));
  EXPECT_EQ(numerical_rank(Matrix::Zero(2, 2)), 0);
}

TEST(Rank, RelativeCutoff) {
  Vector d(3);
  d << 1.0, 1e-9, 1e-11;
  const Matrix m = d.asDiagonal();
  EXPECT_EQ(numerical_rank(m), 2);
  EXPECT_NEAR(condition_number(Matrix(Vector(d.head(2)).asDiagonal())), 1e9, 1.0);
  EXPECT_TRUE(std::isinf(condition_number(Matrix::Zero(2, 2))));
}

TEST(IndependentColumns, PicksAnInvertibleSubmatrix) {
  Matrix m(2, 4);
  m << 1, 2, 0, 1, 1, 2, 1, 0;
  const std::vector<int> cols = independent_columns(m, 2);
  ASSERT_EQ(cols.size(), 2u);
  EXPECT_TRUE(has_full_rank(select_columns(m, cols)));
  EXPECT_THROW(independent_columns(m, 3), RankError);
  Matrix dup(2, 2);
  dup << 1, 2, 1, 2;
  EXPECT_THROW(independent_columns(dup, 2), RankError);
}

TEST(SingularValues, Descending) {
  const Matrix m = Matrix::Random(5, 3);
  const Vector s = singular_values(m);
  ASSERT_EQ(s.size(), 3);
  for (Eigen::Index i = 1; i < s.size(); ++i) EXPECT_GE(s(i - 1), s(i));
  EXPECT_NEAR(s(0), m.operatorNorm(), 1e-12);
}
