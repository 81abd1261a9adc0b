#include "landscape/linalg.hpp"

#include <limits>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "landscape/errors.hpp"

namespace landscape {

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

int numerical_rank(const Matrix& m, double rel_tol) {
  const Vector s = singular_values(m);
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > rel_tol * s[0]) ++r;
  }
  return r;
}

bool has_full_rank(const Matrix& m, double rel_tol) {
  return numerical_rank(m, rel_tol) == static_cast<int>(std::min(m.rows(), m.cols()));
}

double condition_number(const Matrix& m) {
  const Vector s = singular_values(m);
  if (s.size() == 0) return 1.0;
  const double lo = s[s.size() - 1];
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / lo;
}

std::vector<int> independent_columns(const Matrix& m, int count, double rel_tol) {
  if (count > m.cols() || count > m.rows()) {
    throw RankError("cannot pick " + std::to_string(count) + " independent columns from a " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " matrix");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(rel_tol);
  if (qr.rank() < count) {
    throw RankError("only " + std::to_string(qr.rank()) + " independent columns, need " + std::to_string(count));
  }
  std::vector<int> cols;
  const auto& perm = qr.colsPermutation().indices();
  for (int k = 0; k < count; ++k) cols.push_back(perm[k]);
  return cols;
}

Matrix select_columns(const Matrix& m, const std::vector<int>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
  return out;
}

}  // namespace landscape
