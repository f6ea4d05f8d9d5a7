#include "wavedelay/polyform.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/Polynomials>

#include "wavedelay/error.hpp"

namespace wavedelay {

PolyReal::PolyReal(std::vector<double> ascending) : coeffs_(std::move(ascending)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) {
    coeffs_.pop_back();
    ++stripped_;
  }
}

cplx PolyReal::eval(cplx z) const {
  cplx acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cplx PolyReal::derivative(cplx z) const {
  cplx acc = 0.0;
  for (int k = degree(); k >= 1; --k) acc = acc * z + static_cast<double>(k) * coeffs_[k];
  return acc;
}

PolyReal PolyReal::reversed() const {
  std::vector<double> r(coeffs_.rbegin(), coeffs_.rend());
  return PolyReal(std::move(r));
}

PolyReal PolyReal::negated() const {
  std::vector<double> r = coeffs_;
  for (double& c : r) c = -c;
  return PolyReal(std::move(r));
}

PolyReal reduce_to_polynomial(const DelaySystem& sys) {
  if (!sys.tau_rational) throw Error(ErrorCode::InvalidArgument, "unit-disk reduction needs tau = m/n");
  const auto m = sys.tau_rational->num;
  const auto n = sys.tau_rational->den;
  if (m <= 0) throw Error(ErrorCode::InvalidArgument, "delay must be positive");
  const auto [c1, c2] = effective_gains(sys);
  std::vector<double> a(static_cast<std::size_t>(m + 2 * n + 1), 0.0);
  a[0] += 1.0;
  a[2 * n] += 1.0;
  a[m] += c1 + c2;
  a[m + 2 * n] += c1 - c2;
  return PolyReal(std::move(a));
}

cplx z_to_lambda(cplx z, std::int64_t n, std::int64_t branch) {
  const double nn = static_cast<double>(n);
  return -nn * cplx(std::log(std::abs(z)), std::arg(z) + 2.0 * std::numbers::pi * static_cast<double>(branch));
}

namespace {

cplx polish(const PolyReal& p, cplx z) {
  double best = std::abs(p.eval(z));
  for (int it = 0; it < 8; ++it) {
    const cplx d = p.derivative(z);
    if (d == cplx(0.0, 0.0)) break;
    const cplx cand = z - p.eval(z) / d;
    const double r = std::abs(p.eval(cand));
    if (!(r < best)) break;
    best = r;
    z = cand;
  }
  return z;
}

// Companion eigenvalues of a multiple root scatter by O(eps^{1/k}); replacing
// each tight cluster by its centroid restores O(eps) accuracy.
std::vector<cplx> merge_clusters(std::vector<cplx> roots) {
  constexpr double kClusterRadius = 1e-7;
  std::vector<bool> used(roots.size(), false);
  std::vector<cplx> out;
  out.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> members{i};
    used[i] = true;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - roots[i]) < kClusterRadius * (1.0 + std::abs(roots[i]))) {
        members.push_back(j);
        used[j] = true;
      }
    }
    cplx centroid = 0.0;
    for (auto k : members) centroid += roots[k];
    centroid /= static_cast<double>(members.size());
    if (members.size() == 1) centroid = roots[i];
    for (std::size_t k = 0; k < members.size(); ++k) out.push_back(centroid);
  }
  return out;
}

}  // namespace

DiskRootReport disk_roots(const PolyReal& p, double tol) {
  DiskRootReport report;
  report.stripped_leading = p.stripped_leading();
  if (p.degree() <= 0) return report;

  Eigen::VectorXd coeffs(p.degree() + 1);
  for (int i = 0; i <= p.degree(); ++i) coeffs[i] = p[i];
  std::vector<cplx> roots;
  if (p.degree() == 1) {
    roots.push_back(-p[0] / p[1]);
  } else {
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) roots.push_back(polish(p, solver.roots()[i]));
  }
  roots = merge_clusters(std::move(roots));
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : std::arg(a) < std::arg(b);
  });
  for (const cplx& z : roots) {
    const double r = std::abs(z);
    if (std::abs(r - 1.0) < tol) {
      ++report.count_on;
    } else if (r < 1.0) {
      ++report.count_inside;
    } else {
      ++report.count_outside;
    }
  }
  report.roots = std::move(roots);
  return report;
}

bool jury_all_inside(const PolyReal& input) {
  if (input.degree() < 0) throw Error(ErrorCode::InvalidArgument, "zero polynomial");
  if (input.degree() == 0) return true;
  const PolyReal p = input[input.degree()] > 0.0 ? input : input.negated();
  const int m = p.degree();

  // P(+-1) at rounding level means a root on the circle, not inside it.
  double scale = 0.0;
  for (const double a : p.coeffs()) scale += std::abs(a);
  const double floor = 1e-13 * scale;
  if (!(p.eval(1.0).real() > floor)) return false;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  if (!(sign * p.eval(-1.0).real() > floor)) return false;

  const int d = m - 1;
  if (d == 0) return true;
  // Lower-triangular Toeplitz block of a_m..a_2 and the anti-triangular
  // Hankel block of a_0..a_{m-2}.
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd hankel = Eigen::MatrixXd::Zero(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c <= r; ++c) lower(r, c) = p[m - (r - c)];
    for (int c = d - 1 - r; c < d; ++c) hankel(r, c) = p[c - (d - 1 - r)];
  }
  for (const double s : {1.0, -1.0}) {
    const Eigen::MatrixXd jury = lower + s * hankel;
    for (int k = 0; 2 * k < d; ++k) {
      const int size = d - 2 * k;
      if (!(jury.block(k, k, size, size).determinant() > 0.0)) return false;
    }
  }
  return true;
}

PolyStability stability_from_poly(const PolyReal& p, double tol) {
  PolyStability out;
  out.report = disk_roots(p, tol);
  auto& v = out.verdict;
  if (out.report.count_inside == 0 && out.report.count_on == 0) {
    v.state = Stability::Stable;
  } else if (out.report.count_inside == 0) {
    v.state = Stability::Marginal;
  } else {
    v.state = Stability::Unstable;
  }
  if (v.state != Stability::Stable) {
    // Witness: the root of smallest modulus, i.e. largest Re lambda.
    v.witness = out.report.roots.front();
  }
  if (p.degree() >= 0 && p[0] != 0.0) {
    out.jury_reversed_inside = jury_all_inside(p.reversed());
  }
  if (out.jury_reversed_inside != (v.state == Stability::Stable)) {
    v.notes.push_back("Jury route on the reversed polynomial disagrees with the root-modulus oracle");
  }
  return out;
}

}  // namespace wavedelay
