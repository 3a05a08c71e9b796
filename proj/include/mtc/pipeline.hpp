#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mtc/config.hpp"
#include "mtc/core.hpp"
#include "mtc/gof.hpp"
#include "mtc/ingest.hpp"
#include "mtc/report.hpp"

namespace mtc {

struct PipelineOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;  // reserved for stages that sample; fitting is deterministic
  bool quiet = false;
};

struct PipelineResult {
  int exit_code = 0;
  std::vector<std::string> artifacts;
  std::string error;
};

inline const std::set<std::string>& pipeline_config_keys() {
  static const std::set<std::string> keys = {"input",       "slot_ms", "motion_class",
                                             "light_class", "threads", "families"};
  return keys;
}

inline std::vector<Family> parse_family_list(const std::string& csv) {
  std::vector<Family> families;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string token = csv.substr(pos, comma - pos);
    if (!token.empty()) families.push_back(family_from_id(token));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (families.empty()) throw InputError("families: empty list");
  return families;
}

// ingest -> classify -> per-class inter-arrival extraction -> rank_models ->
// report artifacts. Artifacts are removed again if any later stage fails.
inline PipelineResult run_pipeline(const PipelineOptions& opt) {
  namespace fs = std::filesystem;
  PipelineResult result;
  std::string stage = "config";
  auto fail = [&](int code, const std::string& what) {
    for (const auto& path : result.artifacts) {
      std::error_code ec;
      fs::remove(path, ec);
    }
    result.artifacts.clear();
    result.exit_code = code;
    result.error = "stage " + stage + ": " + what;
    return result;
  };

  try {
    const Config cfg = Config::parse_file(opt.config_path);
    cfg.require_known(pipeline_config_keys());
    const std::string input = cfg.get_string("input");
    const std::uint64_t slot_ms = cfg.get_u64("slot_ms", 900000);
    if (slot_ms == 0) throw InputError("slot_ms must be positive");
    const unsigned threads = static_cast<unsigned>(cfg.get_u64("threads", 1));
    const auto families = parse_family_list(cfg.get_string(
        "families", "Exponential,Beta,GeneralizedPareto,Weibull,GEV"));
    std::map<std::string, TrafficClass> overrides;
    overrides["motion"] = traffic_class_from_name(cfg.get_string("motion_class", "event_driven"));
    overrides["light"] = traffic_class_from_name(cfg.get_string("light_class", "quasi_periodic"));

    stage = "ingest";
    const ParseResult parsed = parse_csv_file(input);
    if (!opt.quiet) {
      for (const auto& err : parsed.errors) {
        std::cerr << input << ":" << err.line << ": " << err.message << "\n";
      }
    }
    if (parsed.readings.empty()) throw InputError("no valid readings in " + input);

    stage = "classify";
    // group into (device, measurement) streams; map order keeps everything
    // deterministic regardless of input order or thread count
    std::map<std::pair<std::string, std::string>, std::vector<RawReading>> streams;
    for (const auto& r : parsed.readings) {
      streams[{r.device_id, r.measurement}].push_back(r);
    }
    std::map<TrafficClass, std::vector<double>> class_samples;
    stage = "extract";
    for (auto& [key, readings] : streams) {
      const TrafficClass cls = classify_stream(key.second, overrides);
      const Trace trace = readings_to_trace(std::move(readings), slot_ms,
                                            key.first + ":" + key.second);
      for (std::uint64_t gap : inter_arrival_times(trace)) {
        class_samples[cls].push_back(static_cast<double>(gap));
      }
    }

    stage = "rank";
    fs::create_directories(opt.out_dir);
    std::size_t reports = 0;
    for (const auto cls : {TrafficClass::EventDriven, TrafficClass::QuasiPeriodic}) {
      const auto it = class_samples.find(cls);
      const std::string name = traffic_class_name(cls);
      if (it == class_samples.end() || it->second.size() < 25) {
        if (!opt.quiet) {
          std::cerr << "skipping class " << name << ": fewer than 25 inter-arrival samples\n";
        }
        continue;
      }
      const GofReport report = rank_models(it->second, families, threads);

      stage = "emit";
      auto emit = [&](const std::string& file, const std::string& bytes) {
        const std::string path = (fs::path(opt.out_dir) / file).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << bytes;
        out.close();
        if (!out) throw std::runtime_error("short write on " + path);
        result.artifacts.push_back(path);
      };
      emit("report_" + name + ".json", to_json(report).dump(2) + "\n");
      emit("report_" + name + ".txt", to_table(report));
      emit("tail_errors_" + name + ".json", tail_errors_json(report).dump(2) + "\n");
      std::ostringstream hist;
      write_histogram_tsv(hist, build_histogram(it->second, AutoBins{}));
      emit("histogram_" + name + ".tsv", hist.str());
      ++reports;
      stage = "rank";
    }
    if (reports == 0) throw InputError("no traffic class has enough data to rank");
  } catch (const InputError& e) {
    return fail(2, e.what());
  } catch (const std::exception& e) {
    return fail(1, e.what());
  }
  return result;
}

}  // namespace mtc
