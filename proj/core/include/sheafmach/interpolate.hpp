#pragma once

#include <cmath>

#include "sheafmach/value.hpp"

namespace sheafmach {

/// Customization point for value types stored in continuous streams.
///
/// lerp(a, b, w) is the affine combination a + (b - a) * w for w in [0, 1];
/// distance is the metric used by Lipschitz certificates.
template <class V>
struct Interpolation;

template <>
struct Interpolation<double> {
  static double lerp(double a, double b, double w) { return a + (b - a) * w; }
  static double distance(double a, double b) { return std::fabs(a - b); }
};

template <>
struct Interpolation<Value> {
  static Value lerp(const Value& a, const Value& b, double w) {
    return Value(Interpolation<double>::lerp(a.numeric(), b.numeric(), w));
  }
  static double distance(const Value& a, const Value& b) {
    return std::fabs(a.numeric() - b.numeric());
  }
};

}  // namespace sheafmach
