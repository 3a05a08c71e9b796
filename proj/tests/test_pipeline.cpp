#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mtc/pipeline.hpp"
#include "mtc/report.hpp"

namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("mtcstats_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                   std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << text;
}

fs::path fixture_config(const fs::path& dir, unsigned threads) {
  const fs::path cfg = dir / ("pipeline_t" + std::to_string(threads) + ".conf");
  write_text(cfg, std::string("input = ") + MTC_FIXTURE_CSV + "\n" +
                      "slot_ms = 60000\n" +
                      "threads = " + std::to_string(threads) + "\n");
  return cfg;
}

}  // namespace

TEST_CASE("pipeline on the bundled fixture") {
  const auto dir = make_temp_dir("fixture");
  const auto cfg = fixture_config(dir, 1);
  const auto out_dir = dir / "out";
  const auto result = mtc::run_pipeline({cfg.string(), out_dir.string(), 1, true});
  INFO(result.error);
  REQUIRE(result.exit_code == 0);

  // both classes present and every artifact kind emitted
  for (const char* name : {"event_driven", "quasi_periodic"}) {
    for (const std::string prefix : {"report_", "histogram_", "tail_errors_"}) {
      const std::string ext = prefix == "histogram_" ? ".tsv" : ".json";
      CHECK(fs::exists(out_dir / (prefix + name + ext)));
    }
    CHECK(fs::exists(out_dir / ("report_" + std::string(name) + ".txt")));
  }

  SECTION("report lists all five candidate families") {
    const auto j = mtc::Json::parse(slurp(out_dir / "report_event_driven.json"));
    CHECK(j["entries"].size() == 5);
    CHECK(j["sample_size"].get<std::size_t>() >= 25);
    CHECK(j["alpha"] == 0.01);
  }
}

TEST_CASE("pipeline artifacts are byte-identical across runs and thread counts") {
  const auto dir = make_temp_dir("determinism");
  const auto out1 = dir / "run1";
  const auto out2 = dir / "run2";
  const auto out4 = dir / "run4";
  REQUIRE(mtc::run_pipeline({fixture_config(dir, 1).string(), out1.string(), 42, true}).exit_code == 0);
  REQUIRE(mtc::run_pipeline({fixture_config(dir, 1).string(), out2.string(), 42, true}).exit_code == 0);
  REQUIRE(mtc::run_pipeline({fixture_config(dir, 4).string(), out4.string(), 42, true}).exit_code == 0);
  for (const auto& entry : fs::directory_iterator(out1)) {
    const auto name = entry.path().filename();
    INFO(name);
    CHECK(slurp(entry.path()) == slurp(out2 / name));
    CHECK(slurp(entry.path()) == slurp(out4 / name));
  }
}

TEST_CASE("pipeline error handling") {
  const auto dir = make_temp_dir("errors");
  SECTION("unknown config key is fatal with exit 2") {
    const auto cfg = dir / "bad_key.conf";
    write_text(cfg, "input = x.csv\nsurprise = 1\n");
    const auto result = mtc::run_pipeline({cfg.string(), (dir / "out").string(), 1, true});
    CHECK(result.exit_code == 2);
    CHECK(result.error.find("stage config") != std::string::npos);
    CHECK(result.error.find("surprise") != std::string::npos);
  }
  SECTION("unknown traffic class override names the stage") {
    const auto cfg = dir / "bad_class.conf";
    write_text(cfg, std::string("input = ") + MTC_FIXTURE_CSV + "\nmotion_class = sometimes\n");
    const auto result = mtc::run_pipeline({cfg.string(), (dir / "out").string(), 1, true});
    CHECK(result.exit_code == 2);
    CHECK(result.error.find("stage config") != std::string::npos);
  }
  SECTION("missing input file") {
    const auto cfg = dir / "missing_input.conf";
    write_text(cfg, "input = /nonexistent/readings.csv\n");
    const auto result = mtc::run_pipeline({cfg.string(), (dir / "out").string(), 1, true});
    CHECK(result.exit_code == 2);
    CHECK(result.error.find("stage ingest") != std::string::npos);
  }
  SECTION("not enough data gives exit 2") {
    const auto csv = dir / "tiny.csv";
    write_text(csv,
               "device_id,sensor_type,measurement,timestamp_ms\n"
               "d1,A,co2,0\n"
               "d1,A,co2,60000\n");
    const auto cfg = dir / "tiny.conf";
    write_text(cfg, "input = " + csv.string() + "\nslot_ms = 60000\n");
    const auto result = mtc::run_pipeline({cfg.string(), (dir / "out").string(), 1, true});
    CHECK(result.exit_code == 2);
  }
  SECTION("emit failure removes partial artifacts") {
    const auto out_dir = dir / "blocked";
    fs::create_directories(out_dir / "report_event_driven.txt");  // blocks the second emit
    const auto cfg = fixture_config(dir, 1);
    const auto result = mtc::run_pipeline({cfg.string(), out_dir.string(), 1, true});
    CHECK(result.exit_code == 1);
    CHECK(result.error.find("stage emit") != std::string::npos);
    CHECK_FALSE(fs::exists(out_dir / "report_event_driven.json"));
  }
}

TEST_CASE("cli binary drives the same pipeline") {
  const auto dir = make_temp_dir("cli");
  const auto cfg = fixture_config(dir, 1);
  const auto out_dir = dir / "out";
  const std::string cmd = std::string(MTC_CLI_BIN) + " pipeline --config " + cfg.string() +
                          " --seed 7 --out " + out_dir.string() + " > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(out_dir / "report_event_driven.json"));

  SECTION("bad config exits with code 2") {
    const auto bad = dir / "bad.conf";
    write_text(bad, "nonsense = 1\n");
    const int rc = std::system((std::string(MTC_CLI_BIN) + " pipeline --config " + bad.string() +
                                " --out " + (dir / "o2").string() + " > /dev/null 2>&1")
                                   .c_str());
    CHECK(WEXITSTATUS(rc) == 2);
  }
  SECTION("generate then ingest round trip") {
    const auto gen_cfg = dir / "gen.conf";
    write_text(gen_cfg,
               "model = quasi_periodic\n"
               "nominal_period = 15\n"
               "period_spread = 2\n"
               "jitter = 2\n"
               "start_window = 15\n"
               "p_activate = 0.9\n"
               "device_count = 4\n"
               "horizon = 600\n"
               "slot_ms = 60000\n"
               "measurement = temperature\n");
    const auto gen_out = dir / "gen";
    REQUIRE(std::system((std::string(MTC_CLI_BIN) + " generate --config " + gen_cfg.string() +
                         " --seed 5 --out " + gen_out.string() + " > /dev/null 2>&1")
                            .c_str()) == 0);
    REQUIRE(fs::exists(gen_out / "traces.csv"));
    const auto ing_out = dir / "ing";
    REQUIRE(std::system((std::string(MTC_CLI_BIN) + " ingest --input " +
                         (gen_out / "traces.csv").string() + " --slot-ms 60000 --out " +
                         ing_out.string() + " > /dev/null 2>&1")
                            .c_str()) == 0);
    CHECK(fs::exists(ing_out / "streams.json"));
    CHECK(fs::exists(ing_out / "interarrivals_quasi_periodic.txt"));
    const auto j = mtc::Json::parse(slurp(ing_out / "streams.json"));
    CHECK(j["streams"].size() == 4);
    CHECK(j["streams"][0]["traffic_class"] == "quasi_periodic");
  }
}
