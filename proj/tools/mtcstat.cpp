// mtcstat: synthesize MTC traffic traces, ingest reading CSVs, fit
// inter-arrival distributions and emit ranked goodness-of-fit reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtc/config.hpp"
#include "mtc/core.hpp"
#include "mtc/generators.hpp"
#include "mtc/gof.hpp"
#include "mtc/ingest.hpp"
#include "mtc/pipeline.hpp"
#include "mtc/report.hpp"
#include "mtc/spatial.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

char default_sensor_for(const std::string& measurement) {
  if (measurement == "sound_avg" || measurement == "sound_peak") return 'B';
  if (measurement == "pressure" || measurement == "moisture") return 'C';
  return 'A';
}

std::vector<double> read_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mtc::InputError("cannot open values file: " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double v;
    if (ss >> v) {
      values.push_back(v);
      std::string rest;
      if (ss >> rest) {
        throw mtc::InputError(path + ":" + std::to_string(line_no) + ": trailing characters");
      }
    } else if (!line.empty() && line.find_first_not_of(" \t") != std::string::npos) {
      throw mtc::InputError(path + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  if (values.empty()) throw mtc::InputError("no values in " + path);
  return values;
}

void write_file(const std::string& path, const std::string& bytes) {
  fs::create_directories(fs::path(path).parent_path().empty() ? "." : fs::path(path).parent_path().string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << bytes;
}

// Emit one CSV reading row per active slot; timestamps sit mid-slot so that
// re-ingesting with the same slot_ms reproduces the trace exactly.
void traces_to_csv(std::ostream& out, const std::vector<mtc::Trace>& traces,
                   char sensor_type, const std::string& measurement, std::uint64_t slot_ms) {
  out << mtc::kCsvHeader << '\n';
  for (const auto& trace : traces) {
    for (const auto& tx : trace.transmissions) {
      for (std::uint64_t s = 0; s < tx.duration; ++s) {
        const std::uint64_t ts = (tx.start + s) * slot_ms + slot_ms / 2;
        out << trace.device_id << ',' << sensor_type << ',' << measurement << ',' << ts << '\n';
      }
    }
  }
}

mtc::InfluenceFunction influence_from_config(const mtc::Config& cfg) {
  const std::string kind = cfg.get_string("influence", "hard_disk");
  const double scale = cfg.get_double("influence_scale");
  if (kind == "hard_disk") return mtc::InfluenceFunction::hard_disk(scale);
  if (kind == "exponential") return mtc::InfluenceFunction::exponential_decay(scale);
  if (kind == "gaussian") return mtc::InfluenceFunction::gaussian_decay(scale);
  throw mtc::InputError("influence must be hard_disk, exponential or gaussian");
}

int cmd_generate(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
  const mtc::Config cfg = mtc::Config::parse_file(config_path);
  const std::string model = cfg.get_string("model");
  fs::create_directories(out_dir);

  if (model == "3gpp_uniform" || model == "3gpp_beta") {
    cfg.require_known({"model", "window", "device_count", "alpha", "beta"});
    mtc::ThreeGppConfig g;
    g.model = model == "3gpp_uniform" ? mtc::ThreeGppConfig::Model::Uniform
                                      : mtc::ThreeGppConfig::Model::Beta;
    g.window = cfg.get_double("window");
    g.device_count = cfg.get_u64("device_count");
    if (g.model == mtc::ThreeGppConfig::Model::Beta) {
      g.alpha = cfg.get_double("alpha", 3.0);
      g.beta = cfg.get_double("beta", 4.0);
    }
    const auto arrivals = mtc::gen_3gpp(g, seed);
    std::ostringstream body;
    char buf[40];
    for (double a : arrivals) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", a);
      body << buf;
    }
    const std::string path = (fs::path(out_dir) / "arrivals.tsv").string();
    write_file(path, body.str());
    std::cout << path << "\n";
    return 0;
  }

  const std::uint64_t slot_ms = cfg.get_u64("slot_ms", 900000);
  if (slot_ms == 0) throw mtc::InputError("slot_ms must be positive");
  std::vector<mtc::Trace> traces;

  if (model == "event_driven") {
    cfg.require_known({"model", "slot_ms", "measurement", "sensor_type", "device_prefix",
                       "lambda_t", "device_density", "device_radius", "epicenter_density",
                       "epicenter_radius", "influence", "influence_scale", "q", "horizon",
                       "mode", "p_activate", "area_element", "points_out"});
    mtc::EventDrivenConfig g;
    g.lambda_t = cfg.get_double("lambda_t");
    g.device_field = {cfg.get_double("device_density"), cfg.get_double("device_radius")};
    g.epicenter_field = {cfg.get_double("epicenter_density", g.device_field.density),
                         cfg.get_double("epicenter_radius", g.device_field.region_radius)};
    g.influence = influence_from_config(cfg);
    g.q = cfg.get_double("q", 0.0);
    g.horizon = cfg.get_u64("horizon");
    const std::string mode = cfg.get_string("mode", "spatio_temporal");
    if (mode == "spatio_temporal") {
      g.mode = mtc::EventMode::SpatioTemporal;
    } else if (mode == "reduced") {
      g.mode = mtc::EventMode::Reduced;
    } else {
      throw mtc::InputError("mode must be spatio_temporal or reduced");
    }
    const std::string elem = cfg.get_string("area_element", "linear");
    if (elem == "linear") {
      g.area_element = mtc::AreaElement::LinearAsWritten;
    } else if (elem == "radial") {
      g.area_element = mtc::AreaElement::RadialCorrected;
    } else {
      throw mtc::InputError("area_element must be linear or radial");
    }
    if (cfg.has("p_activate")) g.p_activate = cfg.get_double("p_activate");
    g.device_prefix = cfg.get_string("device_prefix", "mtd");
    std::vector<mtc::Point2D> device_points;
    traces = mtc::gen_event_driven(g, seed, &device_points);
    if (cfg.has("points_out")) {
      std::ostringstream pts;
      mtc::write_points_tsv(pts, device_points);
      const std::string path = (fs::path(out_dir) / cfg.get_string("points_out")).string();
      write_file(path, pts.str());
      std::cout << path << "\n";
    }
  } else if (model == "quasi_periodic") {
    cfg.require_known({"model", "slot_ms", "measurement", "sensor_type", "device_prefix",
                       "nominal_period", "period_spread", "jitter", "start_window",
                       "p_activate", "burst_q", "device_count", "horizon"});
    mtc::QuasiPeriodicConfig g;
    g.nominal_period = cfg.get_u64("nominal_period");
    g.period_spread = cfg.get_u64("period_spread", 0);
    g.jitter = cfg.get_u64("jitter", 0);
    g.start_window = cfg.get_u64("start_window", g.nominal_period);
    g.p_activate = cfg.get_double("p_activate", 1.0);
    g.burst_q = cfg.get_double("burst_q", 0.0);
    g.device_count = cfg.get_u64("device_count");
    g.horizon = cfg.get_u64("horizon");
    g.device_prefix = cfg.get_string("device_prefix", "mtd");
    mtc::GeneratorDiagnostics diag;
    traces = mtc::gen_quasi_periodic(g, seed, &diag);
    if (diag.dropped_overlaps > 0) {
      std::cerr << "dropped " << diag.dropped_overlaps << " overlapping opportunities\n";
    }
  } else {
    throw mtc::InputError(
        "model must be event_driven, quasi_periodic, 3gpp_uniform or 3gpp_beta");
  }

  const std::string measurement = cfg.get_string(
      "measurement", model == "event_driven" ? "co2" : "temperature");
  const std::string sensor_str = cfg.get_string("sensor_type", "");
  const char sensor = sensor_str.empty() ? default_sensor_for(measurement) : sensor_str[0];
  if (sensor_str.size() > 1 || !mtc::sensor_can_measure(sensor, measurement)) {
    throw mtc::InputError("sensor_type/measurement pair is not a valid capability");
  }
  std::ostringstream body;
  traces_to_csv(body, traces, sensor, measurement, slot_ms);
  const std::string path = (fs::path(out_dir) / "traces.csv").string();
  write_file(path, body.str());
  std::cout << path << "\n";
  return 0;
}

int cmd_ingest(const std::string& input, std::uint64_t slot_ms, const std::string& out_dir) {
  const mtc::ParseResult parsed = mtc::parse_csv_file(input);
  for (const auto& err : parsed.errors) {
    std::cerr << input << ":" << err.line << ": " << err.message << "\n";
  }
  if (parsed.readings.empty()) throw mtc::InputError("no valid readings in " + input);

  std::map<std::pair<std::string, std::string>, std::vector<mtc::RawReading>> streams;
  for (const auto& r : parsed.readings) streams[{r.device_id, r.measurement}].push_back(r);

  fs::create_directories(out_dir);
  mtc::Json stream_list = mtc::Json::array();
  std::map<mtc::TrafficClass, std::string> gap_bodies;
  char buf[32];
  for (auto& [key, readings] : streams) {
    const mtc::TrafficClass cls = mtc::classify_stream(key.second);
    const std::size_t n_readings = readings.size();
    const mtc::Trace trace =
        mtc::readings_to_trace(std::move(readings), slot_ms, key.first + ":" + key.second);
    stream_list.push_back(mtc::Json{{"device_id", key.first},
                                    {"measurement", key.second},
                                    {"traffic_class", mtc::traffic_class_name(cls)},
                                    {"readings", n_readings},
                                    {"transmissions", trace.transmissions.size()}});
    for (std::uint64_t gap : mtc::inter_arrival_times(trace)) {
      std::snprintf(buf, sizeof(buf), "%llu\n", static_cast<unsigned long long>(gap));
      gap_bodies[cls] += buf;
    }
  }
  const mtc::Json summary{{"input", input}, {"slot_ms", slot_ms}, {"streams", stream_list}};
  const std::string summary_path = (fs::path(out_dir) / "streams.json").string();
  write_file(summary_path, summary.dump(2) + "\n");
  std::cout << summary_path << "\n";
  for (const auto& [cls, body] : gap_bodies) {
    const std::string path =
        (fs::path(out_dir) / ("interarrivals_" + std::string(mtc::traffic_class_name(cls)) + ".txt"))
            .string();
    write_file(path, body);
    std::cout << path << "\n";
  }
  return 0;
}

int cmd_fit(const std::string& input, const std::string& families_csv, const std::string& out) {
  const auto values = read_values_file(input);
  const auto families = mtc::parse_family_list(families_csv);
  mtc::Json fits = mtc::Json::array();
  for (const auto fam : families) {
    const mtc::FitResult fit = mtc::fit_mle(fam, values);
    mtc::Json j = mtc::to_json(fit);
    j["model_name"] = mtc::family_label(fam);
    fits.push_back(std::move(j));
  }
  const mtc::Json doc{{"sample_size", values.size()}, {"fits", std::move(fits)}};
  if (out.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    write_file(out, doc.dump(2) + "\n");
    std::cout << out << "\n";
  }
  return 0;
}

int cmd_gof(const std::string& input, const std::string& families_csv, const std::string& out,
            unsigned threads) {
  const auto values = read_values_file(input);
  const auto families = mtc::parse_family_list(families_csv);
  const mtc::GofReport report = mtc::rank_models(values, families, threads);
  const std::string bytes = mtc::to_json(report).dump(2) + "\n";
  if (out.empty()) {
    std::cout << bytes;
  } else {
    write_file(out, bytes);
    std::cout << out << "\n";
  }
  return 0;
}

int cmd_report(const std::string& input, const std::string& families_csv,
               const std::string& format, const std::string& out_dir, unsigned threads) {
  const auto values = read_values_file(input);
  const auto families = mtc::parse_family_list(families_csv);
  const mtc::GofReport report = mtc::rank_models(values, families, threads);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "report.json").string(), mtc::to_json(report).dump(2) + "\n");
    write_file((fs::path(out_dir) / "report.txt").string(), mtc::to_table(report));
    write_file((fs::path(out_dir) / "tail_errors.json").string(),
               mtc::tail_errors_json(report).dump(2) + "\n");
    std::ostringstream hist;
    mtc::write_histogram_tsv(hist, mtc::build_histogram(values, mtc::AutoBins{}));
    write_file((fs::path(out_dir) / "histogram.tsv").string(), hist.str());
    std::cout << out_dir << "\n";
    return 0;
  }
  if (format == "json") {
    std::cout << mtc::to_json(report).dump(2) << "\n";
  } else if (format == "tsv") {
    mtc::write_histogram_tsv(std::cout, mtc::build_histogram(values, mtc::AutoBins{}));
  } else {
    std::cout << mtc::to_table(report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MTC traffic synthesis and inter-arrival goodness-of-fit toolkit"};
  app.require_subcommand(1);

  std::string config_path, input, out, format = "table";
  std::string families = "Exponential,Beta,GeneralizedPareto,Weibull,GEV";
  std::uint64_t seed = 1;
  std::uint64_t slot_ms = 900000;
  unsigned threads = 1;

  auto* generate = app.add_subcommand("generate", "synthesize traffic from a model config");
  generate->add_option("--config", config_path, "model config file")->required();
  generate->add_option("--seed", seed, "master seed");
  generate->add_option("--out", out, "output directory")->default_val(".");

  auto* ingest = app.add_subcommand("ingest", "parse a reading CSV into streams and gaps");
  ingest->add_option("--input", input, "reading CSV")->required();
  ingest->add_option("--slot-ms", slot_ms, "slot length in milliseconds");
  ingest->add_option("--out", out, "output directory")->default_val(".");

  auto* fit = app.add_subcommand("fit", "maximum-likelihood fits for a value sample");
  fit->add_option("--input", input, "values file, one number per line")->required();
  fit->add_option("--families", families, "comma-separated family list");
  fit->add_option("--out", out, "output JSON path (default stdout)");

  auto* gof = app.add_subcommand("gof", "ranked goodness-of-fit report as JSON");
  gof->add_option("--input", input, "values file, one number per line")->required();
  gof->add_option("--families", families, "comma-separated family list");
  gof->add_option("--out", out, "output JSON path (default stdout)");
  gof->add_option("--threads", threads, "parallel candidate fits");

  auto* report = app.add_subcommand("report", "full report artifacts for a value sample");
  report->add_option("--input", input, "values file, one number per line")->required();
  report->add_option("--families", families, "comma-separated family list");
  report->add_option("--format", format, "stdout format: json, tsv or table")
      ->check(CLI::IsMember({"json", "tsv", "table"}));
  report->add_option("--out", out, "artifact directory (overrides --format)");
  report->add_option("--threads", threads, "parallel candidate fits");

  auto* pipeline = app.add_subcommand("pipeline", "ingest -> classify -> fit -> report");
  pipeline->add_option("--config", config_path, "pipeline config file")->required();
  pipeline->add_option("--seed", seed, "master seed");
  pipeline->add_option("--out", out, "artifact directory")->default_val(".");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (generate->parsed()) return cmd_generate(config_path, seed, out);
    if (ingest->parsed()) return cmd_ingest(input, slot_ms, out);
    if (fit->parsed()) return cmd_fit(input, families, out);
    if (gof->parsed()) return cmd_gof(input, families, out, threads);
    if (report->parsed()) return cmd_report(input, families, format, out, threads);
    if (pipeline->parsed()) {
      const mtc::PipelineResult result = mtc::run_pipeline({config_path, out, seed});
      if (result.exit_code != 0) {
        std::cerr << result.error << "\n";
      } else {
        for (const auto& artifact : result.artifacts) std::cout << artifact << "\n";
      }
      return result.exit_code;
    }
  } catch (const mtc::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
