#pragma once

#include <cstddef>
#include <vector>

namespace cslq {

/// Strictly increasing list of time nodes. Non-uniform spacing is the normal
/// case here, since the grids come out of an adaptive step-size integrator.
class TimeGrid {
public:
  explicit TimeGrid(std::vector<double> nodes);

  double t0() const { return nodes_.front(); }
  double tf() const { return nodes_.back(); }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Bracketing interval for linear interpolation at time t.
  /// Returns (index i, lambda) such that the interpolated value is
  /// (1 - lambda) * v[i] + lambda * v[i + 1]. Times outside [t0, tf]
  /// clamp to the nearest endpoint (lambda 0 or 1 on a boundary interval).
  struct Bracket {
    std::size_t index;
    double lambda;
  };
  Bracket bracket(double t) const;

private:
  std::vector<double> nodes_;
};

}  // namespace cslq
