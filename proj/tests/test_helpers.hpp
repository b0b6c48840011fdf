#pragma once

// Shared independent oracles for the test suite. Everything here is
// deliberately written from first principles (brute force, series
// expansions, textbook formulas) rather than reusing library code, so
// it can disagree with the implementation under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "ddcur/nn.hpp"

namespace ddcur::testing {

// ---------------------------------------------------------------- gradients

/// Loss as a pure function of the network parameters.
using LossFn = std::function<double(const Mlp&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
};

/// Central finite differences over every parameter. rel error uses a
/// small floor so near-zero gradient pairs do not divide by zero.
inline GradCheckResult finite_difference_check(const Mlp& net,
                                               const Gradients& analytic,
                                               const LossFn& loss,
                                               double h = 1e-5) {
  GradCheckResult result;
  Mlp probe = net;
  auto check_one = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const double up = loss(probe);
    param = saved - h;
    const double down = loss(probe);
    param = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double rel = std::abs(grad - numeric) /
                       std::max({std::abs(grad), std::abs(numeric), 1e-6});
    result.max_rel_error = std::max(result.max_rel_error, rel);
  };
  for (std::size_t l = 0; l < probe.layer_count(); ++l) {
    for (int r = 0; r < probe.weights[l].rows(); ++r) {
      for (int c = 0; c < probe.weights[l].cols(); ++c) {
        check_one(probe.weights[l](r, c), analytic.weights[l](r, c));
      }
    }
    for (int r = 0; r < probe.biases[l].size(); ++r) {
      check_one(probe.biases[l][r], analytic.biases[l][r]);
    }
  }
  return result;
}

/// Smallest |pre-activation| across hidden layers; finite differences
/// are only trustworthy when no rectifier sits near its kink.
inline double min_hidden_preactivation(const Mlp& net, const Mat& inputs) {
  double min_abs = std::numeric_limits<double>::infinity();
  Mat a = inputs;
  for (std::size_t l = 0; l + 1 < net.layer_count(); ++l) {
    Mat z = (net.weights[l] * a).colwise() + net.biases[l];
    min_abs = std::min(min_abs, z.array().abs().minCoeff());
    a = z.cwiseMax(0.0);
  }
  return min_abs;
}

// ------------------------------------------------------------- statistics

/// Regularized lower incomplete gamma P(a, x), series + continued
/// fraction (textbook construction).
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 0.0;
  if (x == 0.0) return 0.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    // series: P(a,x) = e^{-x} x^a / Γ(a) Σ x^n Γ(a)/Γ(a+1+n)
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
  }
  // Lentz continued fraction for Q(a,x), then P = 1 - Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - log_gamma_a) * f;
  return 1.0 - q;
}

/// Upper tail of the chi-square distribution with k dof.
inline double chi_square_p_value(double statistic, int dof) {
  return 1.0 - gamma_p(0.5 * dof, 0.5 * statistic);
}

/// Pearson chi-square goodness-of-fit p-value for observed counts vs
/// expected probabilities.
inline double chi_square_uniformity_p(const std::vector<std::int64_t>& counts,
                                      const std::vector<double>& probs) {
  double total = 0.0;
  for (const std::int64_t c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probs[i];
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
  }
  return chi_square_p_value(stat, static_cast<int>(counts.size()) - 1);
}

inline std::vector<double> ranks_with_ties(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * (static_cast<double>(i) + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

/// Spearman rank correlation with average ranks on ties.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks_with_ties(x), ranks_with_ties(y));
}

/// One-sample Kolmogorov–Smirnov statistic against Uniform[0, 1].
inline double ks_statistic_uniform(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = samples[i];
    d = std::max(d, std::abs((i + 1) / n - cdf));
    d = std::max(d, std::abs(cdf - i / n));
  }
  return d;
}

/// Asymptotic KS tail probability.
inline double ks_p_value(double d, std::size_t n) {
  const double lambda = (std::sqrt(static_cast<double>(n)) + 0.12 +
                         0.11 / std::sqrt(static_cast<double>(n))) *
                        d;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * std::pow(-1.0, j - 1) *
                        std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

// ------------------------------------------------------- grid flood fill

/// Independent shortest-path oracle on a rectangular grid with a wall
/// predicate; Dijkstra-free flood fill over the 4-neighborhood.
inline int flood_fill_distance(int width, int height,
                               const std::function<bool(int, int)>& is_wall,
                               int from_x, int from_y, int to_x, int to_y) {
  std::vector<int> dist(static_cast<std::size_t>(width) * height, -1);
  auto at = [&](int x, int y) -> int& { return dist[y * width + x]; };
  std::vector<std::pair<int, int>> frontier = {{from_x, from_y}};
  at(from_x, from_y) = 0;
  int d = 0;
  while (!frontier.empty()) {
    if (at(to_x, to_y) >= 0) return at(to_x, to_y);
    std::vector<std::pair<int, int>> next;
    ++d;
    for (const auto& [x, y] : frontier) {
      const int moves[4][2] = {{x, y - 1}, {x, y + 1}, {x - 1, y}, {x + 1, y}};
      for (const auto& m : moves) {
        const int nx = m[0], ny = m[1];
        if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
        if (is_wall(nx, ny) || at(nx, ny) >= 0) continue;
        at(nx, ny) = d;
        next.emplace_back(nx, ny);
      }
    }
    frontier = std::move(next);
  }
  return at(to_x, to_y);  // -1 when unreachable
}

}  // namespace ddcur::testing
