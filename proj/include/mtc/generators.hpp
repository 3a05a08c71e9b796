#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mtc/core.hpp"
#include "mtc/rng.hpp"
#include "mtc/spatial.hpp"
#include "mtc/distributions.hpp"

namespace mtc {

namespace detail {

inline std::string device_name(const std::string& prefix, std::size_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04llu", static_cast<unsigned long long>(index));
  return prefix + buf;
}

// Stream layout inside a master seed: stream 0 drives field sampling,
// stream 1 the event process, streams 2+j device j.
constexpr std::uint64_t kFieldStream = 0;
constexpr std::uint64_t kEventStream = 1;
constexpr std::uint64_t kDeviceStreamBase = 2;

}  // namespace detail

struct GeneratorDiagnostics {
  std::uint64_t dropped_overlaps = 0;  // opportunities discarded to keep traces valid
};

enum class EventMode { SpatioTemporal, Reduced };

struct EventDrivenConfig {
  double lambda_t = 0.0;  // event rate per slot; realized as Bernoulli(min(lambda_t, 1))
  PoissonField device_field;
  PoissonField epicenter_field;
  InfluenceFunction influence = InfluenceFunction::hard_disk(1.0);
  double q = 0.0;
  TimeSlot horizon = 0;
  EventMode mode = EventMode::SpatioTemporal;
  AreaElement area_element = AreaElement::LinearAsWritten;
  std::optional<double> p_activate;  // Reduced mode; computed from the influence if unset
  std::string device_prefix = "mtd";

  void validate() const {
    if (!(lambda_t > 0.0)) throw std::domain_error("EventDrivenConfig: lambda_t must be positive");
    device_field.validate();
    epicenter_field.validate();
    if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("EventDrivenConfig: q must be in [0, 1)");
    if (horizon < 1) throw std::domain_error("EventDrivenConfig: horizon must be >= 1");
    if (p_activate && !(*p_activate >= 0.0 && *p_activate <= 1.0)) {
      throw std::domain_error("EventDrivenConfig: p_activate must be in [0, 1]");
    }
  }
};

// Spatio-temporal mode: devices and per-event epicenters are drawn from
// their Poisson fields, events arrive as a Bernoulli-thinned slotted process
// of rate lambda_t, and an event at slot t activates an idle device at t+1
// with probability p(distance). Reduced mode collapses the event geometry
// into a single activation probability and runs the two-state chain per
// device.
inline std::vector<Trace> gen_event_driven(const EventDrivenConfig& cfg,
                                           std::uint64_t master_seed,
                                           std::vector<Point2D>* device_points = nullptr) {
  cfg.validate();
  Rng field_rng(derive_seed(master_seed, detail::kFieldStream));
  const std::vector<Point2D> devices = sample_ppp(cfg.device_field, field_rng);
  if (device_points) *device_points = devices;

  std::vector<Trace> traces;
  traces.reserve(devices.size());

  if (cfg.mode == EventMode::Reduced) {
    const double p = cfg.p_activate
                         ? *cfg.p_activate
                         : activation_probability(cfg.lambda_t, cfg.influence, cfg.area_element);
    for (std::size_t j = 0; j < devices.size(); ++j) {
      Rng dev_rng(derive_seed(master_seed, detail::kDeviceStreamBase + j));
      traces.push_back(simulate_chain({p, cfg.q, 0.0}, cfg.horizon, dev_rng,
                                      detail::device_name(cfg.device_prefix, j)));
    }
    return traces;
  }

  // materialize the event list once; each device then replays it against its
  // own stream, so per-device generation stays order-independent
  const double event_prob = std::min(cfg.lambda_t, 1.0);
  Rng event_rng(derive_seed(master_seed, detail::kEventStream));
  std::vector<std::pair<TimeSlot, Point2D>> events;
  for (TimeSlot t = 0; t < cfg.horizon; ++t) {
    if (event_rng.uniform() < event_prob) {
      const double r = cfg.epicenter_field.region_radius * std::sqrt(event_rng.uniform());
      const double theta = 2.0 * std::numbers::pi * event_rng.uniform();
      events.emplace_back(t, Point2D{r * std::cos(theta), r * std::sin(theta)});
    }
  }

  for (std::size_t j = 0; j < devices.size(); ++j) {
    Rng dev_rng(derive_seed(master_seed, detail::kDeviceStreamBase + j));
    Trace trace;
    trace.device_id = detail::device_name(cfg.device_prefix, j);
    trace.horizon = cfg.horizon;
    TimeSlot next_free = 0;
    for (const auto& [slot, epicenter] : events) {
      if (slot < next_free) continue;  // busy devices do not listen
      const double p = cfg.influence(distance(epicenter, devices[j]));
      if (dev_rng.uniform() < p) {
        const TimeSlot start = slot + 1;
        if (start >= cfg.horizon) continue;
        std::uint64_t duration = 1 + sample_burst_duration(cfg.q, dev_rng);
        if (start + duration > cfg.horizon) duration = cfg.horizon - start;
        trace.transmissions.push_back({start, duration});
        next_free = start + duration;
      }
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

struct QuasiPeriodicConfig {
  std::uint64_t nominal_period = 0;  // slots
  std::uint64_t period_spread = 0;   // max deviation of the per-device period
  std::uint64_t jitter = 0;          // per-cycle start jitter, uniform in [-jitter, +jitter]
  std::uint64_t start_window = 1;    // phase drawn uniformly in [0, start_window)
  double p_activate = 1.0;           // per-opportunity Bernoulli
  double burst_q = 0.0;
  std::size_t device_count = 1;
  TimeSlot horizon = 0;
  std::string device_prefix = "mtd";

  void validate() const {
    if (nominal_period < 1) throw std::domain_error("QuasiPeriodicConfig: period must be >= 1");
    if (nominal_period <= jitter) {
      throw std::domain_error("QuasiPeriodicConfig: nominal_period must exceed jitter");
    }
    if (period_spread >= nominal_period) {
      throw std::domain_error("QuasiPeriodicConfig: period_spread must be below nominal_period");
    }
    if (start_window < 1) throw std::domain_error("QuasiPeriodicConfig: start_window must be >= 1");
    if (!(p_activate >= 0.0 && p_activate <= 1.0)) {
      throw std::domain_error("QuasiPeriodicConfig: p_activate must be in [0, 1]");
    }
    if (!(burst_q >= 0.0 && burst_q < 1.0)) {
      throw std::domain_error("QuasiPeriodicConfig: burst_q must be in [0, 1)");
    }
    if (device_count < 1) throw std::domain_error("QuasiPeriodicConfig: device_count must be >= 1");
    if (horizon < 1) throw std::domain_error("QuasiPeriodicConfig: horizon must be >= 1");
  }
};

// Per device j: phase kappa_j, period T_j drawn once, then transmission
// opportunities at kappa_j + (m-1) T_j, m = 1, 2, ... Each opportunity fires
// independently with p_activate and lands at the base slot plus jitter.
// An opportunity whose burst would overlap the previous transmission is
// dropped and counted in the diagnostics.
inline std::vector<Trace> gen_quasi_periodic(const QuasiPeriodicConfig& cfg,
                                             std::uint64_t master_seed,
                                             GeneratorDiagnostics* diag = nullptr) {
  cfg.validate();
  std::vector<Trace> traces;
  traces.reserve(cfg.device_count);
  for (std::size_t j = 0; j < cfg.device_count; ++j) {
    Rng rng(derive_seed(master_seed, detail::kDeviceStreamBase + j));
    const std::uint64_t kappa = rng.below(cfg.start_window);
    const std::uint64_t period = static_cast<std::uint64_t>(
        rng.uniform_int(static_cast<std::int64_t>(cfg.nominal_period - cfg.period_spread),
                        static_cast<std::int64_t>(cfg.nominal_period + cfg.period_spread)));
    Trace trace;
    trace.device_id = detail::device_name(cfg.device_prefix, j);
    trace.horizon = cfg.horizon;
    TimeSlot next_free = 0;
    for (std::uint64_t base = kappa; base < cfg.horizon; base += period) {
      const bool fires = rng.uniform() < cfg.p_activate;
      if (!fires) continue;
      const std::int64_t jit =
          rng.uniform_int(-static_cast<std::int64_t>(cfg.jitter),
                          static_cast<std::int64_t>(cfg.jitter));
      std::int64_t slot = static_cast<std::int64_t>(base) + jit;
      slot = std::clamp<std::int64_t>(slot, 0, static_cast<std::int64_t>(cfg.horizon) - 1);
      const TimeSlot start = static_cast<TimeSlot>(slot);
      std::uint64_t duration = 1 + sample_burst_duration(cfg.burst_q, rng);
      if (start + duration > cfg.horizon) duration = cfg.horizon - start;
      if (start < next_free) {
        if (diag) ++diag->dropped_overlaps;
        continue;
      }
      trace.transmissions.push_back({start, duration});
      next_free = start + duration;
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

struct ThreeGppConfig {
  enum class Model { Uniform, Beta };
  Model model = Model::Uniform;
  double alpha = 3.0;  // Beta model only
  double beta = 4.0;
  double window = 0.0;  // access window T, in slots
  std::size_t device_count = 1;

  void validate() const {
    if (!(window > 0.0)) throw std::domain_error("ThreeGppConfig: window must be positive");
    if (device_count < 1) throw std::domain_error("ThreeGppConfig: device_count must be >= 1");
    if (model == Model::Beta && !(alpha > 0.0 && beta > 0.0)) {
      throw std::domain_error("ThreeGppConfig: alpha and beta must be positive");
    }
  }
};

// One access time per device in [0, window]: uniform for model 1, the beta
// density for model 2, sampled by inverse CDF.
inline std::vector<double> gen_3gpp(const ThreeGppConfig& cfg, std::uint64_t master_seed) {
  cfg.validate();
  std::vector<double> arrivals;
  arrivals.reserve(cfg.device_count);
  const DistSpec beta_spec = Beta{cfg.alpha, cfg.beta, cfg.window};
  for (std::size_t j = 0; j < cfg.device_count; ++j) {
    Rng rng(derive_seed(master_seed, detail::kDeviceStreamBase + j));
    if (cfg.model == ThreeGppConfig::Model::Uniform) {
      arrivals.push_back(cfg.window * rng.uniform());
    } else {
      arrivals.push_back(quantile(beta_spec, rng.uniform_pos()));
    }
  }
  return arrivals;
}

// Jitters every transmission start and bootstrap-duplicates a fraction of
// them, then restores the trace invariants by sorting and merging overlaps.
inline Trace augment_trace(const Trace& trace, std::uint64_t jitter,
                           double resample_fraction, Rng& rng) {
  if (!(resample_fraction >= 0.0 && resample_fraction <= 1.0)) {
    throw std::domain_error("augment_trace: resample_fraction must be in [0, 1]");
  }
  trace.validate();
  if (jitter == 0 && resample_fraction == 0.0) return trace;

  auto jittered = [&](const Transmission& t) {
    std::int64_t start = static_cast<std::int64_t>(t.start);
    if (jitter > 0) {
      start += rng.uniform_int(-static_cast<std::int64_t>(jitter),
                               static_cast<std::int64_t>(jitter));
    }
    const std::int64_t hi = static_cast<std::int64_t>(trace.horizon - t.duration);
    start = std::clamp<std::int64_t>(start, 0, hi);
    return Transmission{static_cast<TimeSlot>(start), t.duration};
  };

  std::vector<Transmission> moved;
  moved.reserve(trace.transmissions.size());
  for (const auto& t : trace.transmissions) moved.push_back(jittered(t));

  const std::size_t dups = static_cast<std::size_t>(
      std::floor(resample_fraction * static_cast<double>(trace.transmissions.size())));
  for (std::size_t k = 0; k < dups; ++k) {
    const std::size_t idx = static_cast<std::size_t>(rng.below(trace.transmissions.size()));
    moved.push_back(jittered(trace.transmissions[idx]));
  }

  std::sort(moved.begin(), moved.end(), [](const Transmission& a, const Transmission& b) {
    return a.start != b.start ? a.start < b.start : a.duration < b.duration;
  });

  Trace out;
  out.device_id = trace.device_id;
  out.horizon = trace.horizon;
  out.rate_active = trace.rate_active;
  for (const auto& t : moved) {
    if (!out.transmissions.empty()) {
      auto& back = out.transmissions.back();
      const TimeSlot back_end = back.start + back.duration;
      if (t.start < back_end) {
        const TimeSlot merged_end = std::max(back_end, t.start + t.duration);
        back.duration = merged_end - back.start;
        continue;
      }
    }
    out.transmissions.push_back(t);
  }
  out.validate();
  return out;
}

}  // namespace mtc
