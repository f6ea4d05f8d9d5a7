#include "wavedelay/exppoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wavedelay {

ExpPoly::ExpPoly(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.rate < b.rate; });
  for (const auto& t : terms) {
    if (!terms_.empty() && std::abs(terms_.back().rate - t.rate) <= 1e-14 * (1.0 + std::abs(t.rate))) {
      terms_.back().coef += t.coef;
    } else {
      terms_.push_back(t);
    }
  }
  std::erase_if(terms_, [](const Term& t) { return t.coef == 0.0; });
}

cplx ExpPoly::eval(cplx lambda) const {
  cplx sum = 0.0;
  for (const auto& t : terms_) sum += t.coef * std::exp(t.rate * lambda);
  return sum;
}

cplx ExpPoly::derivative(cplx lambda) const {
  cplx sum = 0.0;
  for (const auto& t : terms_) sum += t.coef * t.rate * std::exp(t.rate * lambda);
  return sum;
}

ScaledValue ExpPoly::eval_scaled(cplx lambda) const {
  ScaledValue out{0.0, 0.0, 0.0};
  if (terms_.empty()) return out;
  const double sigma = lambda.real();
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) shift = std::max(shift, t.rate * sigma);
  out.log_scale = shift;
  for (const auto& t : terms_) {
    const cplx e = std::exp(cplx(t.rate * sigma - shift, t.rate * lambda.imag()));
    out.value += t.coef * e;
    out.derivative += t.coef * t.rate * e;
  }
  return out;
}

double ExpPoly::min_rate() const { return terms_.empty() ? 0.0 : terms_.front().rate; }
double ExpPoly::max_rate() const { return terms_.empty() ? 0.0 : terms_.back().rate; }

namespace {

// Smallest sigma beyond which |dominant term| exceeds the sum of the others.
// `sign` = +1 searches to the right with the largest rate dominating, -1 to
// the left with the smallest rate dominating.
double dominance_edge(const std::vector<ExpPoly::Term>& terms, int sign) {
  const auto& dom = sign > 0 ? terms.back() : terms.front();
  // excess(s) = log|dom(s)| - log(sum of others at s); increasing in sign*s.
  auto excess = [&](double s) {
    double others = 0.0;
    const double ref = dom.rate * s;
    for (const auto& t : terms) {
      if (&t == &dom) continue;
      others += std::abs(t.coef) * std::exp(t.rate * s - ref);
    }
    return std::log(std::abs(dom.coef)) - std::log(others);
  };
  double inner = 0.0;
  double outer = sign * 1.0;
  while (excess(outer) <= 0.0) {
    inner = outer;
    outer *= 2.0;
    if (std::abs(outer) > 1e6) break;
  }
  while (excess(inner) > 0.0) {
    outer = inner;
    inner = inner - sign * std::max(1.0, std::abs(inner));
    if (std::abs(inner) > 1e6) break;
  }
  for (int i = 0; i < 200 && std::abs(outer - inner) > 1e-12 * (1.0 + std::abs(outer)); ++i) {
    const double mid = 0.5 * (inner + outer);
    (excess(mid) > 0.0 ? outer : inner) = mid;
  }
  return outer;
}

}  // namespace

std::optional<std::pair<double, double>> ExpPoly::real_part_bounds() const {
  if (terms_.size() < 2) return std::nullopt;
  return std::make_pair(dominance_edge(terms_, -1), dominance_edge(terms_, +1));
}

}  // namespace wavedelay
