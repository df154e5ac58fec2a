#include "minmax/ldlt.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>
#include <stdexcept>

#include "minmax/errors.hpp"

namespace minmax {

namespace {

constexpr double kPivotFloor = std::numeric_limits<double>::min();

void check_pivot(double d, Index k) {
  if (!std::isfinite(d) || std::abs(d) < kPivotFloor) {
    std::ostringstream msg;
    msg << "ldlt_factor: pivot " << k << " broke down (value " << d << ")";
    throw FactorizationBreakdown(msg.str());
  }
}

// Symmetric interchange of j < p in a matrix whose lower triangle holds L in
// the first j columns and the live symmetric block from row/column j on.
void swap_symmetric_lower(Eigen::MatrixXd& w, Index j, Index p) {
  const Index n = w.rows();
  for (Index k = 0; k < j; ++k) std::swap(w(j, k), w(p, k));
  std::swap(w(j, j), w(p, p));
  for (Index i = j + 1; i < p; ++i) std::swap(w(i, j), w(p, i));
  for (Index i = p + 1; i < n; ++i) std::swap(w(i, j), w(i, p));
}

Eigen::VectorXd total_shift(Index n, const GammaPolicy& gamma, const FactorOptions& options) {
  if (gamma.gamma < 0.0) throw std::invalid_argument("GammaPolicy: gamma must be >= 0");
  if (gamma.gamma > 0.0 && static_cast<Index>(gamma.signs.size()) != n) {
    throw std::invalid_argument("GammaPolicy: sign pattern length mismatch");
  }
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(n);
  if (gamma.gamma > 0.0) {
    for (Index i = 0; i < n; ++i) {
      shift(i) = gamma.gamma * (gamma.signs[static_cast<size_t>(i)] < 0 ? -1.0 : 1.0);
    }
  }
  if (options.shift) {
    if (options.shift->size() != n) {
      throw std::invalid_argument("ldlt_factor: shift length mismatch");
    }
    shift += *options.shift;
  }
  return shift;
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const Inertia& in) {
  return os << '(' << in.pos << ',' << in.neg << ',' << in.zero << ')';
}

std::string to_string(const Inertia& in) {
  std::ostringstream os;
  os << in;
  return os.str();
}

double GammaPolicy::default_gamma(const SymMatrix& a) {
  return 1e-8 * (1.0 + a.max_abs_diag());
}

GammaPolicy GammaPolicy::none(Index n) {
  return GammaPolicy{std::vector<std::int8_t>(static_cast<size_t>(n), 1), 0.0};
}

GammaPolicy GammaPolicy::uniform(Index n, std::int8_t sign, double gamma) {
  return GammaPolicy{std::vector<std::int8_t>(static_cast<size_t>(n), sign), gamma};
}

const std::vector<Index>& LdltFactors::permutation() const {
  return symbolic_ ? symbolic_->perm : dense_perm_;
}

Index LdltFactors::nnz_l() const {
  if (sparse_) return symbolic_->nnz_l();
  Index count = 0;
  for (Index j = 0; j < n_; ++j) {
    for (Index i = j + 1; i < n_; ++i) {
      if (l_(i, j) != 0.0) ++count;
    }
  }
  return count;
}

Index LdltFactors::near_gamma_pivots() const {
  if (gamma_ <= 0.0) return 0;
  return (d_.array().abs() <= 10.0 * gamma_).count();
}

Index LdltFactors::collapsed_pivots() const {
  if (gamma_ <= 0.0) return 0;
  return (d_.array().abs() < 1e-3 * gamma_).count();
}

Eigen::MatrixXd LdltFactors::l_dense() const {
  if (!sparse_) {
    Eigen::MatrixXd l = l_.triangularView<Eigen::StrictlyLower>();
    l.diagonal().setOnes();
    return l;
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n_, n_);
  for (Index j = 0; j < n_; ++j) {
    for (Index p = symbolic_->lp[static_cast<size_t>(j)]; p < symbolic_->lp[static_cast<size_t>(j) + 1]; ++p) {
      l(li_[static_cast<size_t>(p)], j) = lx_[static_cast<size_t>(p)];
    }
  }
  return l;
}

Eigen::MatrixXd LdltFactors::reconstruct() const {
  const Eigen::MatrixXd l = l_dense();
  return l * d_.asDiagonal() * l.transpose();
}

void LdltFactors::solve_in_place(Eigen::VectorXd& rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("solve: rhs length mismatch");
  if (!sparse_) {
    Eigen::VectorXd y(n_);
    for (Index k = 0; k < n_; ++k) y(k) = rhs(dense_perm_[static_cast<size_t>(k)]);
    l_.triangularView<Eigen::UnitLower>().solveInPlace(y);
    y.array() /= d_.array();
    l_.triangularView<Eigen::UnitLower>().transpose().solveInPlace(y);
    for (Index k = 0; k < n_; ++k) rhs(dense_perm_[static_cast<size_t>(k)]) = y(k);
    return;
  }
  const auto& s = *symbolic_;
  Eigen::VectorXd y(n_);
  for (Index k = 0; k < n_; ++k) y(k) = rhs(s.perm[static_cast<size_t>(k)]);
  for (Index j = 0; j < n_; ++j) {
    const double yj = y(j);
    for (Index p = s.lp[static_cast<size_t>(j)]; p < s.lp[static_cast<size_t>(j) + 1]; ++p) {
      y(li_[static_cast<size_t>(p)]) -= lx_[static_cast<size_t>(p)] * yj;
    }
  }
  y.array() /= d_.array();
  for (Index j = n_ - 1; j >= 0; --j) {
    double acc = y(j);
    for (Index p = s.lp[static_cast<size_t>(j)]; p < s.lp[static_cast<size_t>(j) + 1]; ++p) {
      acc -= lx_[static_cast<size_t>(p)] * y(li_[static_cast<size_t>(p)]);
    }
    y(j) = acc;
  }
  for (Index k = 0; k < n_; ++k) rhs(s.perm[static_cast<size_t>(k)]) = y(k);
}

void LdltFactors::dump(std::ostream& os) const {
  os << "n " << n_ << " storage " << (sparse_ ? "sparse" : "dense") << " zero_tol "
     << zero_tol_ << " gamma " << gamma_ << '\n';
  os << "perm";
  for (const Index p : permutation()) os << ' ' << p;
  os << "\nD";
  for (Index k = 0; k < n_; ++k) os << ' ' << d_(k);
  os << "\nL pattern (row col)\n";
  const Eigen::MatrixXd l = l_dense();
  for (Index j = 0; j < n_; ++j) {
    for (Index i = j + 1; i < n_; ++i) {
      if (l(i, j) != 0.0) os << i << ' ' << j << '\n';
    }
  }
}

LdltFactors ldlt_factor(const SymMatrix& a, const GammaPolicy& gamma,
                        const FactorOptions& options) {
  const Index n = a.size();
  const Eigen::VectorXd shift = total_shift(n, gamma, options);

  LdltFactors f;
  f.n_ = n;
  f.gamma_ = gamma.gamma;
  f.zero_tol_ = options.zero_tol ? *options.zero_tol
                                 : 1e-11 * (1.0 + a.norm_inf() +
                                            (n > 0 ? shift.cwiseAbs().maxCoeff() : 0.0));
  f.d_.resize(n);

  if (!a.is_sparse()) {
    f.sparse_ = false;
    f.l_ = a.dense();
    f.l_.diagonal() += shift;
    f.dense_perm_.resize(static_cast<size_t>(n));
    for (Index k = 0; k < n; ++k) f.dense_perm_[static_cast<size_t>(k)] = k;
    Eigen::MatrixXd& w = f.l_;  // L below the diagonal, Schur complement in the trailing block
    for (Index j = 0; j < n; ++j) {
      Index p = 0;
      w.diagonal().tail(n - j).cwiseAbs().maxCoeff(&p);
      p += j;
      if (p != j) {
        swap_symmetric_lower(w, j, p);
        std::swap(f.dense_perm_[static_cast<size_t>(j)], f.dense_perm_[static_cast<size_t>(p)]);
      }
      const double dj = w(j, j);
      check_pivot(dj, j);
      f.d_(j) = dj;
      const Index below = n - j - 1;
      if (below > 0) {
        const Eigen::VectorXd col = w.col(j).tail(below);
        w.bottomRightCorner(below, below).selfadjointView<Eigen::Lower>().rankUpdate(col, -1.0 / dj);
        w.col(j).tail(below) /= dj;
      }
    }
    return f;
  }

  f.sparse_ = true;
  const SparseMatrix& lower = a.lower();
  f.symbolic_ = (options.symbolic && options.symbolic->matches(lower))
                    ? options.symbolic
                    : symbolic_analyze(lower, pivot_order(a, shift));
  const SymbolicAnalysis& s = *f.symbolic_;

  std::vector<double> up_x(s.up_i.size(), 0.0);
  const double* vals = lower.valuePtr();
  for (size_t q = 0; q < s.scatter.size(); ++q) up_x[static_cast<size_t>(s.scatter[q])] += vals[q];
  for (Index k = 0; k < n; ++k) {
    up_x[static_cast<size_t>(s.diag_pos[static_cast<size_t>(k)])] += shift(s.perm[static_cast<size_t>(k)]);
  }

  f.li_.assign(static_cast<size_t>(s.nnz_l()), 0);
  f.lx_.assign(static_cast<size_t>(s.nnz_l()), 0.0);
  std::vector<double> y(static_cast<size_t>(n), 0.0);
  std::vector<Index> pattern(static_cast<size_t>(n), 0);
  std::vector<Index> flag(static_cast<size_t>(n), -1);
  std::vector<Index> filled(static_cast<size_t>(n), 0);

  for (Index k = 0; k < n; ++k) {
    Index top = n;
    flag[static_cast<size_t>(k)] = k;
    for (Index p = s.up_p[static_cast<size_t>(k)]; p < s.up_p[static_cast<size_t>(k) + 1]; ++p) {
      Index i = s.up_i[static_cast<size_t>(p)];
      y[static_cast<size_t>(i)] += up_x[static_cast<size_t>(p)];
      Index len = 0;
      for (; flag[static_cast<size_t>(i)] != k; i = s.parent[static_cast<size_t>(i)]) {
        pattern[static_cast<size_t>(len++)] = i;
        flag[static_cast<size_t>(i)] = k;
      }
      while (len > 0) pattern[static_cast<size_t>(--top)] = pattern[static_cast<size_t>(--len)];
    }
    double dk = y[static_cast<size_t>(k)];
    y[static_cast<size_t>(k)] = 0.0;
    for (; top < n; ++top) {
      const Index i = pattern[static_cast<size_t>(top)];
      const double yi = y[static_cast<size_t>(i)];
      y[static_cast<size_t>(i)] = 0.0;
      const Index p0 = s.lp[static_cast<size_t>(i)];
      const Index p1 = p0 + filled[static_cast<size_t>(i)];
      for (Index p = p0; p < p1; ++p) {
        y[static_cast<size_t>(f.li_[static_cast<size_t>(p)])] -= f.lx_[static_cast<size_t>(p)] * yi;
      }
      const double lki = yi / f.d_(i);
      dk -= lki * yi;
      f.li_[static_cast<size_t>(p1)] = k;
      f.lx_[static_cast<size_t>(p1)] = lki;
      ++filled[static_cast<size_t>(i)];
    }
    check_pivot(dk, k);
    f.d_(k) = dk;
  }
  return f;
}

Inertia inertia(const LdltFactors& f) {
  Inertia in;
  const double tol = f.zero_tol();
  for (Index k = 0; k < f.size(); ++k) {
    const double d = f.d()(k);
    if (d > tol) {
      ++in.pos;
    } else if (d < -tol) {
      ++in.neg;
    } else {
      ++in.zero;
    }
  }
  return in;
}

Eigen::VectorXd solve_inplace(const LdltFactors& f, Eigen::VectorXd rhs) {
  if (inertia(f).zero > 0) {
    throw SingularSystem("solve_inplace: factors have zero pivots");
  }
  f.solve_in_place(rhs);
  return rhs;
}

void write_factor_dump(const std::string& path, const LdltFactors& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_factor_dump: cannot open " + path);
  f.dump(out);
}

}  // namespace minmax
