#include "cslq/models/reference_path.hpp"

#include <cmath>
#include <stdexcept>

namespace cslq {

LineSegmentPath::LineSegmentPath(Eigen::Vector2d start, Eigen::Vector2d end, double t_start,
                                 double t_end)
    : start_(std::move(start)), end_(std::move(end)), t_start_(t_start), t_end_(t_end) {
  if (!(t_end_ > t_start_)) {
    throw std::invalid_argument("LineSegmentPath: need t_end > t_start");
  }
}

Eigen::Vector2d LineSegmentPath::position(double t) const {
  const double tau = std::clamp((t - t_start_) / (t_end_ - t_start_), 0.0, 1.0);
  const double s = tau * tau * (3.0 - 2.0 * tau);
  return start_ + s * (end_ - start_);
}

Eigen::Vector2d LineSegmentPath::velocity(double t) const {
  const double tau = (t - t_start_) / (t_end_ - t_start_);
  if (tau <= 0.0 || tau >= 1.0) return Eigen::Vector2d::Zero();
  const double ds = 6.0 * tau * (1.0 - tau) / (t_end_ - t_start_);
  return ds * (end_ - start_);
}

Eigen::Vector2d CirclePath::position(double t) const {
  const double a = omega_ * t + phase_;
  return center_ + radius_ * Eigen::Vector2d(std::cos(a), std::sin(a));
}

Eigen::Vector2d CirclePath::velocity(double t) const {
  const double a = omega_ * t + phase_;
  return radius_ * omega_ * Eigen::Vector2d(-std::sin(a), std::cos(a));
}

Eigen::Vector2d FigureEightPath::position(double t) const {
  const double a = omega_ * t;
  return center_ + a_ * Eigen::Vector2d(std::sin(a), std::sin(a) * std::cos(a));
}

Eigen::Vector2d FigureEightPath::velocity(double t) const {
  const double a = omega_ * t;
  return a_ * omega_ *
         Eigen::Vector2d(std::cos(a), std::cos(a) * std::cos(a) - std::sin(a) * std::sin(a));
}

}  // namespace cslq
