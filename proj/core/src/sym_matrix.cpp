#include "minmax/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "minmax/errors.hpp"

namespace minmax {

namespace {

void require_finite(double v) {
  if (!std::isfinite(v)) {
    throw CallbackFailure("SymMatrix: non-finite entry");
  }
}

}  // namespace

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& full) {
  if (full.rows() != full.cols()) {
    throw std::invalid_argument("SymMatrix::from_dense: matrix is not square");
  }
  SymMatrix m;
  m.n_ = full.rows();
  m.storage_ = Storage::Dense;
  m.dense_.resize(m.n_, m.n_);
  for (Index j = 0; j < m.n_; ++j) {
    for (Index i = j; i < m.n_; ++i) {
      const double v = full(i, j);
      require_finite(v);
      m.dense_(i, j) = v;
      m.dense_(j, i) = v;
    }
  }
  return m;
}

SymMatrix SymMatrix::from_triplets(Index n, const std::vector<Triplet>& entries,
                                   Storage storage) {
  SymMatrix m;
  m.n_ = n;
  m.storage_ = storage;
  if (storage == Storage::Dense) {
    m.dense_.setZero(n, n);
    for (const auto& t : entries) {
      require_finite(t.value());
      const Index i = std::max(t.row(), t.col());
      const Index j = std::min(t.row(), t.col());
      m.dense_(i, j) += t.value();
    }
    m.dense_.triangularView<Eigen::StrictlyUpper>() =
        m.dense_.transpose().triangularView<Eigen::StrictlyUpper>();
    return m;
  }

  std::vector<Triplet> lower;
  lower.reserve(entries.size() + static_cast<size_t>(n));
  for (Index k = 0; k < n; ++k) lower.emplace_back(k, k, 0.0);
  for (const auto& t : entries) {
    require_finite(t.value());
    lower.emplace_back(std::max(t.row(), t.col()), std::min(t.row(), t.col()),
                       t.value());
  }
  m.lower_.resize(n, n);
  m.lower_.setFromTriplets(lower.begin(), lower.end());
  m.lower_.makeCompressed();
  return m;
}

SymMatrix::Storage SymMatrix::choose_storage(Index n, Index nnz_lower) {
  if (n < kSparseMinSize) return Storage::Dense;
  const double full_nnz = 2.0 * static_cast<double>(nnz_lower) - static_cast<double>(n);
  const double density = full_nnz / (static_cast<double>(n) * static_cast<double>(n));
  return density < kSparseMaxDensity ? Storage::Sparse : Storage::Dense;
}

double SymMatrix::coeff(Index i, Index j) const {
  if (storage_ == Storage::Dense) return dense_(i, j);
  return lower_.coeff(std::max(i, j), std::min(i, j));
}

Eigen::MatrixXd SymMatrix::to_dense() const {
  if (storage_ == Storage::Dense) return dense_;
  Eigen::MatrixXd full = Eigen::MatrixXd(lower_);
  full.triangularView<Eigen::StrictlyUpper>() =
      full.transpose().triangularView<Eigen::StrictlyUpper>();
  return full;
}

Eigen::VectorXd SymMatrix::diagonal() const {
  if (storage_ == Storage::Dense) return dense_.diagonal();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
  for (Index j = 0; j < n_; ++j) {
    for (SparseMatrix::InnerIterator it(lower_, j); it; ++it) {
      if (it.row() == j) d(j) = it.value();
    }
  }
  return d;
}

double SymMatrix::norm_inf() const {
  if (n_ == 0) return 0.0;
  if (storage_ == Storage::Dense) return dense_.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(n_);
  for (Index j = 0; j < n_; ++j) {
    for (SparseMatrix::InnerIterator it(lower_, j); it; ++it) {
      const double a = std::abs(it.value());
      row_sums(it.row()) += a;
      if (it.row() != j) row_sums(j) += a;
    }
  }
  return row_sums.maxCoeff();
}

double SymMatrix::max_abs_diag() const {
  if (n_ == 0) return 0.0;
  return diagonal().cwiseAbs().maxCoeff();
}

Index SymMatrix::nnz_lower() const {
  if (storage_ == Storage::Sparse) return lower_.nonZeros();
  Index count = 0;
  for (Index j = 0; j < n_; ++j) {
    for (Index i = j; i < n_; ++i) {
      if (i == j || dense_(i, j) != 0.0) ++count;
    }
  }
  return count;
}

double SymMatrix::density() const {
  if (n_ == 0) return 0.0;
  const double full_nnz = 2.0 * static_cast<double>(nnz_lower()) - static_cast<double>(n_);
  return full_nnz / (static_cast<double>(n_) * static_cast<double>(n_));
}

Eigen::VectorXd SymMatrix::multiply(const Eigen::VectorXd& v) const {
  if (storage_ == Storage::Dense) return dense_ * v;
  Eigen::VectorXd out = lower_ * v;
  out += lower_.transpose() * v;
  // The diagonal was counted twice.
  for (Index j = 0; j < n_; ++j) {
    for (SparseMatrix::InnerIterator it(lower_, j); it; ++it) {
      if (it.row() == j) out(j) -= it.value() * v(j);
    }
  }
  return out;
}

SymMatrix SymMatrix::principal_block(Index offset, Index size) const {
  if (offset < 0 || size < 0 || offset + size > n_) {
    throw std::out_of_range("SymMatrix::principal_block: range out of bounds");
  }
  if (storage_ == Storage::Dense) {
    SymMatrix m;
    m.n_ = size;
    m.storage_ = Storage::Dense;
    m.dense_ = dense_.block(offset, offset, size, size);
    return m;
  }
  std::vector<Triplet> entries;
  for (Index j = offset; j < offset + size; ++j) {
    for (SparseMatrix::InnerIterator it(lower_, j); it; ++it) {
      if (it.row() >= offset && it.row() < offset + size) {
        entries.emplace_back(it.row() - offset, j - offset, it.value());
      }
    }
  }
  const Index nnz = static_cast<Index>(entries.size());
  return from_triplets(size, entries, choose_storage(size, nnz));
}

SymMatrix SymMatrix::plus_diagonal(const Eigen::VectorXd& shift) const {
  if (shift.size() != n_) {
    throw std::invalid_argument("SymMatrix::plus_diagonal: size mismatch");
  }
  SymMatrix m = *this;
  if (storage_ == Storage::Dense) {
    m.dense_.diagonal() += shift;
    return m;
  }
  for (Index j = 0; j < n_; ++j) {
    for (SparseMatrix::InnerIterator it(m.lower_, j); it; ++it) {
      if (it.row() == j) it.valueRef() += shift(j);
    }
  }
  return m;
}

}  // namespace minmax
