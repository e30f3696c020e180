#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "superrad/error.hpp"
#include "superrad/model.hpp"
#include "superrad/permbasis.hpp"

namespace testing {

inline superrad::ModelParams fig2_params(int n) {
  superrad::ModelParams p;
  p.n_emitters = n;
  p.g_collective = 0.4;
  p.delta = -0.35;
  p.kappa = 0.01;
  p.gamma = 0.001;
  p.gamma_phi = 0.0075;
  return superrad::validate(p);
}

/// Vibronic parameter set with N = 1e8, Delta = 0 and no dephasing.
inline superrad::ModelParams fig4_params(double huang_rhys = 0.0) {
  superrad::ModelParams p;
  p.n_emitters = 100'000'000;
  p.g_collective = 0.2;
  p.kappa = 0.01;
  p.gamma = 1e-6;
  p.omega_nu = 0.15;
  p.huang_rhys = huang_rhys;
  p.gamma_nu = 0.01;
  p.temperature = 0.026;
  return superrad::validate(p);
}

/// Error code thrown by fn, or nullopt when it returns normally.
template <class Fn>
std::optional<superrad::ErrorCode> error_code(Fn&& fn) {
  try {
    fn();
  } catch (const superrad::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = a + (b - a) * k / (count - 1);
  return out;
}

/// Explicit matrix of |n><n'| (x) O_lambda on photon (x) emitter^N with
/// emitter index 0 = down, 1 = up.
inline Eigen::MatrixXcd basis_operator(const superrad::Pattern& lambda, int n, int np,
                                       int photon_levels) {
  const int sites = lambda.total();
  const int width = 1 << sites;
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(photon_levels * width, photon_levels * width);
  int combos = 1;
  for (int k = 0; k < sites; ++k) combos *= 4;
  for (int code = 0; code < combos; ++code) {
    superrad::Pattern counts;
    int row = 0;
    int col = 0;
    int c = code;
    for (int k = 0; k < sites; ++k) {
      const auto unit = static_cast<superrad::SiteUnit>(c % 4);
      c /= 4;
      ++counts[unit];
      const int l = (unit == superrad::SiteUnit::uu || unit == superrad::SiteUnit::ud) ? 1 : 0;
      const int r = (unit == superrad::SiteUnit::uu || unit == superrad::SiteUnit::du) ? 1 : 0;
      row = 2 * row + l;
      col = 2 * col + r;
    }
    if (counts == lambda) x(n * width + row, np * width + col) += 1.0;
  }
  return x;
}

}  // namespace testing
