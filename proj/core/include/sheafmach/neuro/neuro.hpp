#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sheafmach/machine.hpp"
#include "sheafmach/neuro/reflectance.hpp"

namespace sheafmach::neuro {

/// Pixels 0..n-1 and the direction each one looks at.
struct CameraGeometry {
  std::vector<double> dirs;

  /// n pixels at 2πi/n.
  static CameraGeometry uniform(std::size_t n);
  std::size_t size() const noexcept { return dirs.size(); }
};

/// ±1 polarity of a pixel event.
inline const ValueDomain& polarity_domain() {
  static const ValueDomain d = ValueDomain::polarity();
  return d;
}
/// Firing records ⊙_{s∈S} Q of an n-pixel camera.
ValueDomain firing_domain(std::size_t n);

double sat(double b, double u);

/// Pointwise natural log on [floor, ∞). Output bound K_in / floor.
/// Throws DomainError (during the run) on an input value below the floor.
Machine log_machine(double floor, Duration h);

/// Polarity DDS: state (r, q); next brightness r' gives (r', +1) when r' - r >= C,
/// (r', -1) when r' - r <= -C, and keeps q otherwise.
Machine polarity_machine(double contrast, double r0);

/// log ⨟ C-level-crossing (anchor r0) ⨟ polarity.
Machine pixel_machine(double contrast, double r0, double floor, Duration h);

/// Tensor of pixel machines; input is the product of per-pixel intensities,
/// output the firing records. `r0` holds each pixel's initial log-brightness.
Machine event_camera(const CameraGeometry& geom, double contrast, const std::vector<double>& r0, double floor,
                     Duration h);

struct RegulatorParams {
  double decay = 1.0;           // a
  double gain = 1.0;            // κ
  std::vector<double> estimate;  // f(dir(s)) per pixel
};

struct RegulatorState {
  double last_time = 0.0;
  double statistic = 0.0;
};

/// Heading regulator: on a firing record at t over the set S,
///   S_t = exp(-a (t - last)) S_prev - (κ / a) Σ_{s∈S} f(dir(s)),
/// output (t, S_t). Polarities are ignored.
Machine heading_regulator(const RegulatorParams& p, RegulatorState x0);

struct BodyParams {
  double saturation = 1.0;  // b
  double theta0 = 0.0;
  double u0 = 0.0;
  Duration h = Duration::from_ticks(1'000'000);
};

/// ZOH(u0) ⨟ CDS(θ̇ = sat_b(u), θ0, identity readout); output bound b.
/// The ZOH output is recorded as "u_zoh".
Machine body_dynamics(const BodyParams& p);

/// One intensity wire per pixel: t ↦ m(θ(t) + dir(s)). Bound K_m · K_θ.
Machine observed_scene(const CameraGeometry& geom, const ReflectanceMap& m, double theta_bound, Duration h);

enum class Estimator { GoalRelative, Mirrored, Table };

/// f(dir(s)) per pixel: wrap(dir - θ_g) (goal-relative) or wrap(-dir - θ_g) (mirrored).
std::vector<double> estimator_values(const CameraGeometry& geom, Estimator kind, double theta_goal);

struct LoopParams {
  CameraGeometry geometry = CameraGeometry::uniform(16);
  ReflectanceMap reflectance = ReflectanceMap::constant(1.0, 1e-6);
  double contrast = 0.3;
  RegulatorParams regulator;
  BodyParams body;
  Duration loop_delay = Duration::from_ticks(10'000'000);
};

/// Tr(B ⨟ O ⨟ C ⨟ H ⨟ Del_ε) over the control wire, with an empty delay
/// prefix. Type (1, 1). Taps: "u_zoh", "theta", "intensity", "camera",
/// "regulator", "loop".
Machine closed_loop(const LoopParams& p);

/// Runs the closed loop for `duration` (windows of the loop delay).
RunRecord run_closed_loop(const LoopParams& p, Duration duration);

/// One row of the sampled loop trace.
struct TraceRow {
  Time t;
  double theta = 0.0;
  double u_zoh = 0.0;
  std::size_t events_in_window = 0;  // camera events in (t - interval, t]
  double statistic = 0.0;           // last regulator output at or before t (x0 before any)
};

/// Rows at t = 0, interval, 2·interval, ... <= length.
std::vector<TraceRow> sample_trace(const RunRecord& r, Duration interval, double statistic0 = 0.0);

/// One row per fired pixel: (t, pixel, polarity).
struct PixelEvent {
  Time t;
  std::size_t pixel = 0;
  int polarity = 0;
};
std::vector<PixelEvent> pixel_events(const RunRecord& r);

}  // namespace sheafmach::neuro
