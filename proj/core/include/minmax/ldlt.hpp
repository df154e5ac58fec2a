#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minmax/sym_matrix.hpp"

namespace minmax {

/// Counts of positive, negative and zero eigenvalues.
struct Inertia {
  Index pos = 0;
  Index neg = 0;
  Index zero = 0;

  Index size() const { return pos + neg + zero; }
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

std::ostream& operator<<(std::ostream& os, const Inertia& in);
std::string to_string(const Inertia& in);

/// Signed diagonal regularization added before factoring: A + gamma*diag(signs).
struct GammaPolicy {
  std::vector<std::int8_t> signs;
  double gamma = 0.0;

  /// gamma = 1e-8 * (1 + max|A_ii|).
  static double default_gamma(const SymMatrix& a);
  /// No regularization at all.
  static GammaPolicy none(Index n);
  static GammaPolicy uniform(Index n, std::int8_t sign, double gamma);
};

/// Fill-reducing ordering and elimination structure for one sparsity pattern.
/// Computed once and reused for every numeric factorization of that pattern.
struct SymbolicAnalysis {
  Index n = 0;
  std::vector<Index> perm;   ///< perm[k] = original index eliminated k-th
  std::vector<Index> iperm;  ///< inverse of perm
  std::vector<Index> parent; ///< elimination tree on permuted indices, -1 at roots
  std::vector<Index> lp;     ///< column pointers of strictly-lower L

  // Permuted upper triangle of A (column k holds rows < k plus the diagonal),
  // plus where each stored entry of the source lower CSC lands in it.
  std::vector<Index> up_p;
  std::vector<Index> up_i;
  std::vector<Index> scatter;
  std::vector<Index> diag_pos;  ///< position of diagonal k in up_i

  // Source pattern, kept to validate reuse.
  std::vector<Index> src_outer;
  std::vector<Index> src_inner;

  Index nnz_l() const { return lp.empty() ? 0 : lp.back(); }
  bool matches(const SparseMatrix& lower) const;
};

/// Minimum-degree ordering of the graph of a lower-triangular pattern.
/// Ties go to the lowest index, so the result is deterministic.
std::vector<Index> minimum_degree_order(const SparseMatrix& lower);

/// Elimination order picked from the values of A + diag(shift). Each step takes
/// the lowest-degree node whose current pivot is at least tau times its largest
/// remaining off-diagonal entry, or the best such ratio when none qualifies.
/// Guards against O(gamma^2) pivots that a purely structural order can produce
/// on KKT matrices with rank-deficient coupled blocks.
std::vector<Index> pivot_order(const SymMatrix& a, const Eigen::VectorXd& shift,
                               double tau = 0.01);

std::shared_ptr<const SymbolicAnalysis> symbolic_analyze(const SparseMatrix& lower);
std::shared_ptr<const SymbolicAnalysis> symbolic_analyze(const SparseMatrix& lower,
                                                         std::vector<Index> perm);

struct FactorOptions {
  /// Defaults to 1e-11 * (1 + ||A||_inf).
  std::optional<double> zero_tol;
  /// Extra diagonal added on top of A + Gamma (used for the E modifications).
  std::optional<Eigen::VectorXd> shift;
  /// Reused when its pattern matches; otherwise a fresh pivot_order analysis
  /// of this matrix is made.
  std::shared_ptr<const SymbolicAnalysis> symbolic;
};

/// Immutable L*D*L' factors of P*(A + Gamma + shift)*P'.
class LdltFactors {
 public:
  Index size() const { return n_; }
  bool is_sparse() const { return sparse_; }
  const Eigen::VectorXd& d() const { return d_; }
  double zero_tol() const { return zero_tol_; }
  double gamma() const { return gamma_; }
  /// perm[k] = original index eliminated k-th.
  const std::vector<Index>& permutation() const;
  const std::shared_ptr<const SymbolicAnalysis>& symbolic() const { return symbolic_; }

  /// Strictly-lower nonzeros of L (structural for sparse, numeric for dense).
  Index nnz_l() const;
  /// D entries within 10*gamma of zero; these may owe their sign to Gamma.
  Index near_gamma_pivots() const;
  /// D entries far below gamma (or exactly zero), a sign of cancellation under
  /// a poor elimination order rather than of a small eigenvalue.
  Index collapsed_pivots() const;

  /// Unit lower factor in permuted order, as a dense matrix.
  Eigen::MatrixXd l_dense() const;
  /// L*diag(D)*L' in permuted order.
  Eigen::MatrixXd reconstruct() const;

  /// Solves (A + Gamma + shift) v = rhs in place.
  void solve_in_place(Eigen::VectorXd& rhs) const;

  /// Text dump of the L pattern and D for inspection.
  void dump(std::ostream& os) const;

 private:
  friend LdltFactors ldlt_factor(const SymMatrix&, const GammaPolicy&, const FactorOptions&);

  Index n_ = 0;
  bool sparse_ = false;
  double zero_tol_ = 0.0;
  double gamma_ = 0.0;
  Eigen::VectorXd d_;
  Eigen::MatrixXd l_;  // dense path
  std::vector<Index> dense_perm_;
  std::vector<Index> li_;  // sparse path, row indices per symbolic lp
  std::vector<double> lx_;
  std::shared_ptr<const SymbolicAnalysis> symbolic_;
};

/// LDL' of A + Gamma (+ options.shift) with 1x1 pivots only. The dense path
/// pivots on the largest remaining diagonal; the sparse path follows the
/// symmetric order fixed by its symbolic analysis.
LdltFactors ldlt_factor(const SymMatrix& a, const GammaPolicy& gamma,
                        const FactorOptions& options = {});

Inertia inertia(const LdltFactors& f);

/// Returns v with (A + Gamma) v = rhs. Throws SingularSystem when any pivot
/// counts as zero.
Eigen::VectorXd solve_inplace(const LdltFactors& f, Eigen::VectorXd rhs);

/// Writes the pattern and D of a factorization to a text file.
void write_factor_dump(const std::string& path, const LdltFactors& f);

}  // namespace minmax
