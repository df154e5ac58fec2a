#include "minmax/certify.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <complex>
#include <sstream>

#include "minmax/epsilon.hpp"
#include "minmax/errors.hpp"
#include "minmax/newton.hpp"

namespace minmax {

namespace {

constexpr double kTol = 0.02;

Eigen::Vector2cd sorted_eigs(const Eigen::Matrix2d& m) {
  Eigen::Vector2cd e = Eigen::EigenSolver<Eigen::Matrix2d>(m, false).eigenvalues();
  auto less = [](std::complex<double> a, std::complex<double> b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  };
  if (less(e(1), e(0))) std::swap(e(0), e(1));
  return e;
}

CounterexampleCase evaluate(const std::string& label, const Eigen::Matrix2d& h,
                            const Modification& fooled) {
  Dims d;
  d.nx = 1;
  d.ny = 1;
  CounterexampleCase c;
  c.label = label;
  c.hessian = h;
  c.fooled = fooled;
  c.fooled_eigs = sorted_eigs(iteration_jacobian(h, d, fooled));
  const EpsilonSelection sel =
      select_epsilons_unconstrained(SymMatrix::from_dense(h), d, EpsilonOptions{});
  c.selected = sel.mod;
  const Eigen::Vector2cd se = sorted_eigs(iteration_jacobian(h, d, sel.mod));
  c.selected_radius = std::max(std::abs(se(0)), std::abs(se(1)));
  return c;
}

std::string fmt(std::complex<double> z) {
  std::ostringstream os;
  os.precision(4);
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
  return os.str();
}

}  // namespace

CertificationReport certify_counterexamples(bool report_only) {
  const auto t0 = std::chrono::steady_clock::now();
  CertificationReport r;
  Eigen::Matrix2d h2;
  h2 << 3, -4, -4, 2;
  Eigen::Matrix2d h3;
  h3 << -0.5, 1, 1, -1;
  r.stable_non_minmax = evaluate("1.5x^2-4xy+y^2", h2, Modification{0.0, 4.0});
  // The printed matrix adds diag(0.3, -3); the prose says 0.2, which gives 3+-2.45i.
  r.unstable_minmax = evaluate("-0.25x^2+xy-0.5y^2", h3, Modification{0.3, 3.0});

  bool ok = true;
  auto check = [&](bool cond, const std::string& what) {
    r.checks.push_back((cond ? "ok   " : "FAIL ") + what);
    ok = ok && cond;
  };
  const auto& a = r.stable_non_minmax;
  const auto& b = r.unstable_minmax;
  check(std::abs(a.fooled_eigs(0) - 0.0) <= kTol && std::abs(a.fooled_eigs(1) - 0.54) <= kTol,
        a.label + ": eigenvalues " + fmt(a.fooled_eigs(0)) + ", " + fmt(a.fooled_eigs(1)) +
            " vs {0, 0.54}");
  check(std::abs(b.fooled_eigs(0) - std::complex<double>(1.5, -1.5)) <= kTol &&
            std::abs(b.fooled_eigs(1) - std::complex<double>(1.5, 1.5)) <= kTol &&
            std::abs(b.fooled_eigs(0)) > 1.0,
        b.label + ": eigenvalues " + fmt(b.fooled_eigs(0)) + ", " + fmt(b.fooled_eigs(1)) +
            " vs 1.5+-1.5i");
  check(!(a.selected == a.fooled), a.label + ": selector avoids (0, 4)");
  check(!(b.selected == b.fooled), b.label + ": selector avoids (0.3, 3)");
  {
    std::ostringstream os;
    os << a.label << ": selected (" << a.selected.eps_x << ", " << a.selected.eps_y
       << ") has spectral radius " << a.selected_radius << " > 1";
    check(a.selected_radius > 1.0, os.str());
  }
  {
    std::ostringstream os;
    os << b.label << ": selected (" << b.selected.eps_x << ", " << b.selected.eps_y
       << ") has spectral radius " << b.selected_radius << " < 1";
    check(b.selected_radius < 1.0, os.str());
  }
  r.passed = ok;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!ok && !report_only) {
    std::string msg = "counterexample certification failed:";
    for (const auto& c : r.checks) msg += "\n  " + c;
    throw CertificationFailure(msg);
  }
  return r;
}

}  // namespace minmax
