#pragma once

#include <vector>

#include "landscape/network.hpp"

namespace landscape {

/// Relative cutoff for numerical rank: singular values above
/// kRankTolerance * sigma_max count.
inline constexpr double kRankTolerance = 1e-10;

Vector singular_values(const Matrix& m);
int numerical_rank(const Matrix& m, double rel_tol = kRankTolerance);
bool has_full_rank(const Matrix& m, double rel_tol = kRankTolerance);
/// sigma_max / sigma_min; +inf for a singular matrix.
double condition_number(const Matrix& m);

/// Indices of `count` linearly independent columns picked by column-pivoted
/// QR, in pivot order. RankError if fewer than `count` are independent.
std::vector<int> independent_columns(const Matrix& m, int count, double rel_tol = kRankTolerance);

/// Square submatrix m(:, cols).
Matrix select_columns(const Matrix& m, const std::vector<int>& cols);

}  // namespace landscape
