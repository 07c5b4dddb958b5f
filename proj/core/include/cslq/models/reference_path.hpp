#pragma once

#include <Eigen/Core>
#include <memory>

namespace cslq {

/// Planar operational-space reference with a well-defined first derivative.
class ReferencePath {
public:
  virtual ~ReferencePath() = default;
  virtual Eigen::Vector2d position(double t) const = 0;
  virtual Eigen::Vector2d velocity(double t) const = 0;
};

/// Constant hold at a fixed point.
class FixedPoint : public ReferencePath {
public:
  explicit FixedPoint(Eigen::Vector2d p) : p_(std::move(p)) {}
  Eigen::Vector2d position(double) const override { return p_; }
  Eigen::Vector2d velocity(double) const override { return Eigen::Vector2d::Zero(); }

private:
  Eigen::Vector2d p_;
};

/// Straight segment traversed with smoothstep timing, so the velocity is
/// continuous and vanishes at both ends.
class LineSegmentPath : public ReferencePath {
public:
  LineSegmentPath(Eigen::Vector2d start, Eigen::Vector2d end, double t_start, double t_end);
  Eigen::Vector2d position(double t) const override;
  Eigen::Vector2d velocity(double t) const override;

private:
  Eigen::Vector2d start_, end_;
  double t_start_, t_end_;
};

/// Circle of given radius, constant angular rate.
class CirclePath : public ReferencePath {
public:
  CirclePath(Eigen::Vector2d center, double radius, double angular_rate, double phase = 0.0)
      : center_(std::move(center)), radius_(radius), omega_(angular_rate), phase_(phase) {}
  Eigen::Vector2d position(double t) const override;
  Eigen::Vector2d velocity(double t) const override;

private:
  Eigen::Vector2d center_;
  double radius_, omega_, phase_;
};

/// Lemniscate-style figure eight: c + (a sin(wt), a sin(wt) cos(wt)).
class FigureEightPath : public ReferencePath {
public:
  FigureEightPath(Eigen::Vector2d center, double amplitude, double angular_rate)
      : center_(std::move(center)), a_(amplitude), omega_(angular_rate) {}
  Eigen::Vector2d position(double t) const override;
  Eigen::Vector2d velocity(double t) const override;

private:
  Eigen::Vector2d center_;
  double a_, omega_;
};

}  // namespace cslq
