#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mtc/core.hpp"

namespace mtc {

// Raised for malformed user input (files, configs); the CLI maps it to a
// distinct exit code.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawReading {
  std::string device_id;
  char sensor_type = 'A';  // A, B or C
  std::string measurement;
  std::uint64_t timestamp_ms = 0;
};

inline const std::vector<std::string>& known_measurements() {
  static const std::vector<std::string> names = {
      "co2",     "motion",   "light",    "sound_avg", "sound_peak",
      "pressure", "moisture", "temperature", "humidity", "battery"};
  return names;
}

// Capability sets per sensor type; every type also reports temperature,
// humidity and battery.
inline bool sensor_can_measure(char sensor_type, std::string_view measurement) {
  if (measurement == "temperature" || measurement == "humidity" || measurement == "battery") {
    return true;
  }
  switch (sensor_type) {
    case 'A':
      return measurement == "co2" || measurement == "motion" || measurement == "light";
    case 'B':
      return measurement == "sound_avg" || measurement == "sound_peak" ||
             measurement == "motion" || measurement == "light";
    case 'C':
      return measurement == "pressure" || measurement == "moisture";
    default:
      return false;
  }
}

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct ParseResult {
  std::vector<RawReading> readings;
  std::vector<RowError> errors;
};

inline constexpr const char* kCsvHeader = "device_id,sensor_type,measurement,timestamp_ms";

// Reads the reading CSV. A wrong header is fatal; malformed rows are
// collected with their line numbers and parsing continues.
inline ParseResult parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv: empty input, expected header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw InputError("csv: bad header, expected '" + std::string(kCsvHeader) + "'");
  }
  ParseResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      fields.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 4) {
      result.errors.push_back({line_no, "expected 4 fields, got " + std::to_string(fields.size())});
      continue;
    }
    RawReading r;
    r.device_id = fields[0];
    if (r.device_id.empty()) {
      result.errors.push_back({line_no, "empty device_id"});
      continue;
    }
    if (fields[1].size() != 1 || (fields[1][0] != 'A' && fields[1][0] != 'B' && fields[1][0] != 'C')) {
      result.errors.push_back({line_no, "sensor_type must be A, B or C"});
      continue;
    }
    r.sensor_type = fields[1][0];
    r.measurement = fields[2];
    if (!sensor_can_measure(r.sensor_type, r.measurement)) {
      result.errors.push_back(
          {line_no, "measurement '" + r.measurement + "' not reported by type " + r.sensor_type});
      continue;
    }
    try {
      std::size_t used = 0;
      const unsigned long long ts = std::stoull(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("trailing characters");
      r.timestamp_ms = ts;
    } catch (const std::exception&) {
      result.errors.push_back({line_no, "bad timestamp_ms '" + fields[3] + "'"});
      continue;
    }
    result.readings.push_back(std::move(r));
  }
  return result;
}

inline ParseResult parse_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file: " + path);
  return parse_csv(in);
}

inline void write_csv(std::ostream& out, const std::vector<RawReading>& readings) {
  out << kCsvHeader << '\n';
  for (const auto& r : readings) {
    out << r.device_id << ',' << r.sensor_type << ',' << r.measurement << ','
        << r.timestamp_ms << '\n';
  }
}

enum class TrafficClass { EventDriven, QuasiPeriodic };

inline const char* traffic_class_name(TrafficClass c) {
  return c == TrafficClass::EventDriven ? "event_driven" : "quasi_periodic";
}

inline TrafficClass traffic_class_from_name(const std::string& name) {
  if (name == "event_driven") return TrafficClass::EventDriven;
  if (name == "quasi_periodic") return TrafficClass::QuasiPeriodic;
  throw InputError("unknown traffic class '" + name + "' (event_driven, quasi_periodic)");
}

// Sound and CO2 streams behave as event alarms; environmental quantities
// drift and report on the periodic cadence. Motion and light sit in between
// and can be overridden.
inline TrafficClass classify_stream(
    const std::string& measurement,
    const std::map<std::string, TrafficClass>& overrides = {}) {
  if (const auto it = overrides.find(measurement); it != overrides.end()) return it->second;
  if (measurement == "co2" || measurement == "sound_avg" || measurement == "sound_peak" ||
      measurement == "motion") {
    return TrafficClass::EventDriven;
  }
  if (measurement == "temperature" || measurement == "humidity" || measurement == "pressure" ||
      measurement == "moisture" || measurement == "light" || measurement == "battery") {
    return TrafficClass::QuasiPeriodic;
  }
  std::string valid;
  for (const auto& m : known_measurements()) {
    if (!valid.empty()) valid += ", ";
    valid += m;
  }
  throw InputError("unknown measurement '" + measurement + "'; expected one of: " + valid);
}

// Maps one (device, measurement) stream of readings onto a slotted trace.
// Readings sharing a slot collapse to a single one-slot transmission.
inline Trace readings_to_trace(std::vector<RawReading> readings, std::uint64_t slot_ms,
                               std::string trace_id = {}) {
  if (slot_ms == 0) throw std::domain_error("readings_to_trace: slot_ms must be positive");
  Trace trace;
  trace.device_id = std::move(trace_id);
  if (readings.empty()) {
    trace.horizon = 0;
    return trace;
  }
  if (trace.device_id.empty()) {
    trace.device_id = readings.front().device_id + ":" + readings.front().measurement;
  }
  std::sort(readings.begin(), readings.end(),
            [](const RawReading& a, const RawReading& b) { return a.timestamp_ms < b.timestamp_ms; });
  for (const auto& r : readings) {
    const TimeSlot slot = r.timestamp_ms / slot_ms;
    if (!trace.transmissions.empty() && trace.transmissions.back().start == slot) continue;
    trace.transmissions.push_back({slot, 1});
  }
  trace.horizon = trace.transmissions.back().start + 1;
  trace.validate();
  return trace;
}

// --- histograms ---------------------------------------------------------

struct FixedWidth {
  double width;
};
struct FixedCount {
  std::size_t count;
};
struct AutoBins {};
using BinRule = std::variant<FixedWidth, FixedCount, AutoBins>;

struct Histogram {
  std::vector<double> bin_edges;       // strictly increasing, counts.size()+1
  std::vector<std::uint64_t> counts;
  std::vector<double> density;         // integrates to 1
};

// Equal-width histogram. Auto uses ceil(sqrt(n)) bins over [min, max]; a
// degenerate span is widened to unit width. The last bin is right-closed.
inline Histogram build_histogram(const std::vector<double>& values, BinRule rule = AutoBins{}) {
  if (values.empty()) throw std::domain_error("build_histogram: empty values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;

  std::size_t bins = 0;
  double width = 0.0;
  if (std::holds_alternative<FixedWidth>(rule)) {
    width = std::get<FixedWidth>(rule).width;
    if (!(width > 0.0)) throw std::domain_error("build_histogram: width must be positive");
    bins = hi > lo ? static_cast<std::size_t>(std::ceil((hi - lo) / width)) : 1;
  } else {
    if (std::holds_alternative<FixedCount>(rule)) {
      bins = std::get<FixedCount>(rule).count;
      if (bins == 0) throw std::domain_error("build_histogram: need at least one bin");
    } else {
      bins = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(values.size()))));
    }
    if (hi <= lo) hi = lo + 1.0;  // all values equal
    width = (hi - lo) / static_cast<double>(bins);
  }

  Histogram h;
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.bin_edges[i] = lo + width * static_cast<double>(i);
  }
  h.counts.assign(bins, 0);
  for (double v : values) {
    std::size_t idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;
    ++h.counts[idx];
  }
  h.density.resize(bins);
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < bins; ++i) {
    const double w = h.bin_edges[i + 1] - h.bin_edges[i];
    h.density[i] = static_cast<double>(h.counts[i]) / (n * w);
  }
  return h;
}

}  // namespace mtc
