#include "sheafmach/neuro/reflectance.hpp"

#include <algorithm>
#include <cmath>

#include "sheafmach/errors.hpp"

namespace sheafmach::neuro {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);  // in [-π, π]
  if (r <= -M_PI) r += kTwoPi;
  return r;
}

ReflectanceMap ReflectanceMap::fourier(double dc, std::vector<double> cos_k, std::vector<double> sin_k, double floor) {
  if (!(floor > 0.0)) throw DomainError("reflectance floor must be positive");
  ReflectanceMap m;
  m.dc_ = dc;
  m.cos_ = std::move(cos_k);
  m.sin_ = std::move(sin_k);
  m.floor_ = floor;
  const std::size_t n = std::max(m.cos_.size(), m.sin_.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double a = k < m.cos_.size() ? std::fabs(m.cos_[k]) : 0.0;
    const double b = k < m.sin_.size() ? std::fabs(m.sin_[k]) : 0.0;
    m.lipschitz_ += static_cast<double>(k + 1) * (a + b);
  }
  return m;
}

ReflectanceMap ReflectanceMap::table(std::vector<double> values, double floor) {
  if (!(floor > 0.0)) throw DomainError("reflectance floor must be positive");
  if (values.size() < 2) throw DomainError("reflectance table needs at least two entries");
  ReflectanceMap m;
  m.table_ = std::move(values);
  m.floor_ = floor;
  const double step = kTwoPi / static_cast<double>(m.table_.size());
  for (std::size_t i = 0; i < m.table_.size(); ++i) {
    const double next = m.table_[(i + 1) % m.table_.size()];
    m.lipschitz_ = std::max(m.lipschitz_, std::fabs(next - m.table_[i]) / step);
  }
  return m;
}

double ReflectanceMap::operator()(double alpha) const {
  double v = dc_;
  if (!table_.empty()) {
    const double n = static_cast<double>(table_.size());
    double x = std::fmod(alpha, kTwoPi);
    if (x < 0) x += kTwoPi;
    const double pos = x / kTwoPi * n;
    const auto i = static_cast<std::size_t>(std::min(std::floor(pos), n - 1));
    const double w = pos - static_cast<double>(i);
    v = table_[i] + (table_[(i + 1) % table_.size()] - table_[i]) * w;
  } else {
    const std::size_t n = std::max(cos_.size(), sin_.size());
    for (std::size_t k = 0; k < n; ++k) {
      const double ka = static_cast<double>(k + 1) * alpha;
      if (k < cos_.size()) v += cos_[k] * std::cos(ka);
      if (k < sin_.size()) v += sin_[k] * std::sin(ka);
    }
  }
  return std::max(v, floor_);
}

}  // namespace sheafmach::neuro
