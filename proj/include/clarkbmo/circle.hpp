#pragma once

#include <complex>
#include <numbers>

namespace clarkbmo {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kAngleTol = 1e-12;

/// Maps any real angle into [0, 2pi).
double normalize_angle(double angle);

/// Point of the unit circle, stored by its angle in [0, 2pi).
class CirclePoint {
 public:
  CirclePoint() = default;
  explicit CirclePoint(double angle) : angle_(normalize_angle(angle)) {}

  static CirclePoint from_complex(cplx z);

  double angle() const { return angle_; }
  cplx value() const { return std::polar(1.0, angle_); }

  CirclePoint rotated(double by) const { return CirclePoint(angle_ + by); }

  /// Chordal distance |xi - z|.
  double chord(const CirclePoint& other) const;

  /// Counterclockwise angular distance from this point to `other`, in [0, 2pi).
  double ccw_to(const CirclePoint& other) const;

 private:
  double angle_ = 0.0;
};

/// Closed arc starting at `start` and running counterclockwise for `extent` radians.
/// extent == 2pi is the whole circle; extent == 0 is the degenerate arc {start}.
class Arc {
 public:
  Arc(CirclePoint start, double extent);

  static Arc full_circle() { return Arc(CirclePoint(0.0), kTwoPi); }

  const CirclePoint& start() const { return start_; }
  double extent() const { return extent_; }
  CirclePoint end() const { return start_.rotated(extent_); }
  bool is_full() const { return extent_ >= kTwoPi - kAngleTol; }

  /// Closed-arc membership with wrap-around, tolerance kAngleTol on both ends.
  bool contains(const CirclePoint& p) const;

  Arc rotated(double by) const { return Arc(start_.rotated(by), extent_); }

 private:
  CirclePoint start_;
  double extent_;
};

}  // namespace clarkbmo
