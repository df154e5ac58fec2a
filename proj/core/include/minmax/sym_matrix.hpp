#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

namespace minmax {

using Index = Eigen::Index;
using Triplet = Eigen::Triplet<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric matrix stored either densely or as a lower-triangular CSC
/// pattern. The sparse form always carries every diagonal entry in its
/// pattern (possibly as an explicit zero), so diagonal shifts never change the
/// symbolic structure.
class SymMatrix {
 public:
  enum class Storage { Dense, Sparse };

  /// Sparse storage is used only from this size upward.
  static constexpr Index kSparseMinSize = 64;
  /// ... and only while the full pattern density stays below this fraction.
  static constexpr double kSparseMaxDensity = 0.25;

  SymMatrix() = default;

  /// Builds from a full symmetric matrix; only the lower triangle is read.
  static SymMatrix from_dense(const Eigen::MatrixXd& full);

  /// Builds from coordinate entries. Entries may sit in either triangle and
  /// are mirrored into the lower one; duplicates are summed.
  static SymMatrix from_triplets(Index n, const std::vector<Triplet>& entries,
                                 Storage storage);

  /// Picks dense or sparse storage from size and lower-triangle nonzeros
  /// (diagonal included).
  static Storage choose_storage(Index n, Index nnz_lower);

  Index size() const { return n_; }
  Storage storage() const { return storage_; }
  bool is_sparse() const { return storage_ == Storage::Sparse; }

  /// Full symmetric values; valid only for dense storage.
  const Eigen::MatrixXd& dense() const { return dense_; }
  /// Lower triangle in compressed-column form; valid only for sparse storage.
  const SparseMatrix& lower() const { return lower_; }

  double coeff(Index i, Index j) const;
  Eigen::MatrixXd to_dense() const;
  Eigen::VectorXd diagonal() const;

  /// Maximum absolute row sum.
  double norm_inf() const;
  double max_abs_diag() const;

  /// Structural nonzeros of the lower triangle, diagonal included.
  Index nnz_lower() const;
  /// Structural nonzeros of the full matrix divided by n^2.
  double density() const;

  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;

  /// The principal submatrix on rows/cols [offset, offset + size).
  SymMatrix principal_block(Index offset, Index size) const;

  /// Returns this + diag(shift) with the same storage and pattern.
  SymMatrix plus_diagonal(const Eigen::VectorXd& shift) const;

 private:
  Index n_ = 0;
  Storage storage_ = Storage::Dense;
  Eigen::MatrixXd dense_;
  SparseMatrix lower_;
};

}  // namespace minmax
