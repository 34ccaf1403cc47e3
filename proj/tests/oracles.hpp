#pragma once

// Independent reference computations used only by tests. None of these call
// into the code paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace farsivec::testing {

using PairCounts = std::map<std::pair<unsigned, unsigned>, double>;

/// Double loop over every ordered pair of positions inside a sentence.
/// For positions a < b with b - a <= window both (a,b) and (b,a) gain
/// weight(b - a); visiting a ascending then b ascending reproduces the
/// summation order of a left-to-right window scan.
inline PairCounts brute_force_cooccurrence(const std::vector<std::vector<unsigned>>& sentences, std::size_t window,
                                           bool harmonic = true) {
  PairCounts out;
  for (const auto& s : sentences) {
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = 0; b < s.size(); ++b) {
        if (b <= a || b - a > window) continue;
        const double w = harmonic ? 1.0 / static_cast<double>(b - a) : 1.0;
        out[{s[a], s[b]}] += w;
        out[{s[b], s[a]}] += w;
      }
    }
  }
  return out;
}

/// Central finite difference of f with respect to x[k].
inline double central_difference(const std::function<double()>& f, double& x, double step) {
  const double saved = x;
  x = saved + step;
  const double up = f();
  x = saved - step;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * step);
}

/// |a - b| <= max(abs_tol, rel_tol * max(|a|, |b|))
inline bool close(double a, double b, double rel_tol, double abs_tol) {
  return std::abs(a - b) <= std::max(abs_tol, rel_tol * std::max(std::abs(a), std::abs(b)));
}

inline double plain_cosine(std::span<const double> u, std::span<const double> v) {
  double uv = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    uv += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  return uv / std::sqrt(uu * vv);
}

}  // namespace farsivec::testing
