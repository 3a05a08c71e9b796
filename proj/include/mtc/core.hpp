#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mtc/rng.hpp"

namespace mtc {

// Discrete time in transmission time intervals (TTI).
using TimeSlot = std::uint64_t;

struct Transmission {
  TimeSlot start = 0;
  std::uint64_t duration = 1;  // in slots, always >= 1
};

// Per-device activity record. Transmissions are sorted, starts strictly
// increasing, and back-to-back bursts never overlap.
struct Trace {
  std::string device_id;
  std::vector<Transmission> transmissions;
  TimeSlot horizon = 0;       // exclusive upper bound on occupied slots
  double rate_active = 0.0;   // generator metadata, not used by statistics

  void validate() const {
    TimeSlot next_free = 0;
    bool first = true;
    for (const auto& t : transmissions) {
      if (t.duration < 1) throw std::invalid_argument("Trace: zero-length transmission");
      if (!first && t.start < next_free) {
        throw std::invalid_argument("Trace: transmissions overlap or are out of order");
      }
      if (t.start + t.duration > horizon) {
        throw std::invalid_argument("Trace: transmission exceeds horizon");
      }
      next_free = t.start + t.duration;
      first = false;
    }
  }
};

struct MarkovParams {
  double p_activate = 0.0;   // I -> A transition probability per slot
  double q = 0.0;            // burstiness, A -> A self-transition probability
  double rate_active = 0.0;  // traffic rate while active; carried as metadata

  void validate() const {
    if (!(p_activate >= 0.0 && p_activate <= 1.0)) {
      throw std::domain_error("MarkovParams: p_activate must be in [0, 1]");
    }
    if (!(q >= 0.0 && q < 1.0)) {
      throw std::domain_error("MarkovParams: q must be in [0, 1)");
    }
    if (!(rate_active >= 0.0)) {
      throw std::domain_error("MarkovParams: rate_active must be non-negative");
    }
  }
};

struct DeviceState {
  std::uint64_t remaining = 0;  // active slots left; 0 means idle
  bool is_active() const { return remaining > 0; }
};

// P(burst lasts k extra slots) = (1-q) q^k, k = 0, 1, ...
inline double geometric_pmf(std::uint64_t k, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("geometric_pmf: q must be in [0, 1)");
  return (1.0 - q) * std::pow(q, static_cast<double>(k));
}

// Inverse-CDF draw from the geometric burst law. For q = 0 the ratio below
// is a finite negative over -inf, i.e. +0, so the degenerate case needs no
// branch.
inline std::uint64_t sample_burst_duration(double q, Rng& rng) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw std::domain_error("sample_burst_duration: q must be in [0, 1)");
  }
  const double u = rng.uniform_pos();
  return static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log(q)));
}

// Two-state chain: idle -> active with probability p_activate per slot,
// active sojourns are 1+k slots with k geometric. The state at slot 0 is
// idle, so the earliest possible start is slot 1. A burst cut by the horizon
// is truncated.
inline Trace simulate_chain(const MarkovParams& params, TimeSlot horizon, Rng& rng,
                            std::string device_id = "mtd0") {
  params.validate();
  if (horizon < 1) throw std::domain_error("simulate_chain: horizon must be >= 1");
  Trace trace;
  trace.device_id = std::move(device_id);
  trace.horizon = horizon;
  trace.rate_active = params.rate_active;
  TimeSlot t = 0;  // current idle slot
  while (t + 1 < horizon) {
    if (rng.uniform() < params.p_activate) {
      const TimeSlot start = t + 1;
      std::uint64_t duration = 1 + sample_burst_duration(params.q, rng);
      if (start + duration > horizon) duration = horizon - start;
      trace.transmissions.push_back({start, duration});
      t = start + duration;  // first idle slot after the burst
    } else {
      ++t;
    }
  }
  return trace;
}

// Differences between consecutive transmission starts.
inline std::vector<std::uint64_t> inter_arrival_times(const Trace& trace) {
  std::vector<std::uint64_t> gaps;
  if (trace.transmissions.size() < 2) return gaps;
  gaps.reserve(trace.transmissions.size() - 1);
  for (std::size_t i = 1; i < trace.transmissions.size(); ++i) {
    gaps.push_back(trace.transmissions[i].start - trace.transmissions[i - 1].start);
  }
  return gaps;
}

}  // namespace mtc
