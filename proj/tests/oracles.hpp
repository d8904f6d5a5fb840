#pragma once
// Reference computations used only by tests. None of these call into the
// code paths they are compared against.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Arc distance between centers of cells i and j on an n-cell circle grid.
inline double cell_distance(int i, int j, int n) {
  const int d = std::abs(i - j) % n;
  return 2.0 * pi * std::min(d, n - d) / n;
}

/// Optimal transport cost between supply p and demand q (same total) on an
/// n-cell circle, by successive shortest paths on the bipartite residual graph.
inline double transport_lp(const std::vector<double>& p, const std::vector<double>& q) {
  const int n = static_cast<int>(p.size());
  std::vector<double> supply = p, demand = q;
  std::vector<double> flow(static_cast<std::size_t>(n * n), 0.0);
  const double eps = 1e-15;
  double cost = 0.0;
  for (int guard = 0; guard < 100000; ++guard) {
    // Nodes 0..n-1 sources, n..2n-1 sinks. Bellman-Ford from all sources with spare supply.
    std::vector<double> dist(static_cast<std::size_t>(2 * n), std::numeric_limits<double>::infinity());
    std::vector<int> parent(static_cast<std::size_t>(2 * n), -1);
    for (int i = 0; i < n; ++i)
      if (supply[i] > eps) dist[i] = 0.0;
    for (int round = 0; round < 2 * n; ++round) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double c = cell_distance(i, j, n);
          if (dist[i] + c < dist[n + j] - 1e-15) {
            dist[n + j] = dist[i] + c;
            parent[n + j] = i;
            changed = true;
          }
          if (flow[i * n + j] > eps && dist[n + j] - c < dist[i] - 1e-15) {
            dist[i] = dist[n + j] - c;
            parent[i] = n + j;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    int sink = -1;
    for (int j = 0; j < n; ++j)
      if (demand[j] > eps && std::isfinite(dist[n + j]) && (sink < 0 || dist[n + j] < dist[n + sink])) sink = j;
    if (sink < 0) break;
    double amount = demand[sink];
    int v = n + sink;
    while (parent[v] >= 0) {
      const int u = parent[v];
      if (u < n) v = u;
      else {
        amount = std::min(amount, flow[v * n + (u - n)]);
        v = u;
      }
    }
    amount = std::min(amount, supply[v]);
    const int source = v;
    v = n + sink;
    while (parent[v] >= 0) {
      const int u = parent[v];
      if (u < n) flow[u * n + (v - n)] += amount;
      else flow[v * n + (u - n)] -= amount;
      v = u;
    }
    supply[source] -= amount;
    demand[sink] -= amount;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost += flow[i * n + j] * cell_distance(i, j, n);
  return cost;
}

/// 1/2 int |phi'|^2 for phi = sqrt((1 + a cos)/2pi) by the trapezoid rule on
/// `nodes` points using the analytic derivative.
inline double cosine_rate_quadrature(double a, int nodes) {
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double theta = 2.0 * pi * k / nodes;
    const double density = (1.0 + a * std::cos(theta)) / (2.0 * pi);
    const double phi_prime = -a * std::sin(theta) / (2.0 * pi) / (2.0 * std::sqrt(density));
    sum += phi_prime * phi_prime;
  }
  return 0.5 * sum * 2.0 * pi / nodes;
}

inline double cosine_rate_closed_form(double a) { return (1.0 - std::sqrt(1.0 - a * a)) / 8.0; }

/// Tip of the radial slit [r, 1] whose complement has conformal radius e^{-t}:
/// 4 r / (1 + r)^2 = e^{-t}.
inline double radial_slit_tip(double t) {
  const double c = 2.0 * std::exp(t) - 1.0;
  return c - std::sqrt(c * c - 1.0);
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return worst;
}

/// Critical value of the two-sample KS statistic at level alpha (asymptotic).
inline double ks_critical(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) / static_cast<double>(n * m));
}

/// Limit covariance of the centered bridge functional as a function of the lag.
inline double bridge_lag_covariance(double lag) {
  double d = std::fmod(std::abs(lag), 2.0 * pi);
  return 2.0 * pi / 3.0 - 2.0 * d + d * d / pi;
}

}  // namespace oracle
