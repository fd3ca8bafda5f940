#pragma once

#include <vector>

namespace sheafmach::neuro {

/// Wraps an angle to (-π, π].
double wrap_angle(double a);

/// Periodic scene reflectance m: S¹ → [floor, ∞).
///
/// Either a Fourier series dc + Σ_k (cos_k cos kα + sin_k sin kα), or a table of
/// values at the uniform angles 2πi/n interpolated linearly (periodically).
/// Values below the floor are clamped to it, which keeps m Lipschitz and log m defined.
class ReflectanceMap {
 public:
  static ReflectanceMap fourier(double dc, std::vector<double> cos_k, std::vector<double> sin_k, double floor);
  static ReflectanceMap table(std::vector<double> values, double floor);
  static ReflectanceMap constant(double v, double floor) { return fourier(v, {}, {}, floor); }

  double operator()(double alpha) const;
  /// Lipschitz bound K_m of m.
  double lipschitz() const noexcept { return lipschitz_; }
  double floor() const noexcept { return floor_; }
  bool is_table() const noexcept { return !table_.empty(); }
  double dc() const noexcept { return dc_; }
  const std::vector<double>& cos_terms() const noexcept { return cos_; }
  const std::vector<double>& sin_terms() const noexcept { return sin_; }
  const std::vector<double>& table_values() const noexcept { return table_; }

 private:
  ReflectanceMap() = default;
  double dc_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<double> table_;
  double floor_ = 0.0;
  double lipschitz_ = 0.0;
};

}  // namespace sheafmach::neuro
