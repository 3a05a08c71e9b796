#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "mtc/config.hpp"
#include "mtc/ingest.hpp"
#include "mtc/rng.hpp"

using Catch::Matchers::WithinAbs;

TEST_CASE("csv parsing") {
  SECTION("header only") {
    std::istringstream in("device_id,sensor_type,measurement,timestamp_ms\n");
    const auto result = mtc::parse_csv(in);
    CHECK(result.readings.empty());
    CHECK(result.errors.empty());
  }
  SECTION("valid row") {
    std::istringstream in(
        "device_id,sensor_type,measurement,timestamp_ms\n"
        "dev1,A,co2,1700000000000\n");
    const auto result = mtc::parse_csv(in);
    REQUIRE(result.readings.size() == 1);
    const auto& r = result.readings[0];
    CHECK(r.device_id == "dev1");
    CHECK(r.sensor_type == 'A');
    CHECK(r.measurement == "co2");
    CHECK(r.timestamp_ms == 1700000000000ull);
  }
  SECTION("bad header is fatal") {
    std::istringstream in("device,type,meas,ts\nx,A,co2,1\n");
    CHECK_THROWS_AS(mtc::parse_csv(in), mtc::InputError);
  }
  SECTION("row errors are collected and parsing continues") {
    std::istringstream in(
        "device_id,sensor_type,measurement,timestamp_ms\n"
        "dev1,A,co2\n"                 // 3 fields
        "dev2,X,co2,5\n"               // bad sensor type
        "dev3,C,co2,5\n"               // type C cannot measure co2
        "dev4,B,sound_avg,notanumber\n"
        "dev5,B,sound_peak,17\n");
    const auto result = mtc::parse_csv(in);
    REQUIRE(result.readings.size() == 1);
    CHECK(result.readings[0].device_id == "dev5");
    REQUIRE(result.errors.size() == 4);
    CHECK(result.errors[0].line == 2);
    CHECK(result.errors[1].line == 3);
    CHECK(result.errors[2].line == 4);
    CHECK(result.errors[3].line == 5);
  }
  SECTION("write then parse is the identity") {
    mtc::Rng rng(8);
    std::vector<mtc::RawReading> readings;
    const char types[] = {'A', 'B', 'C'};
    const std::vector<std::vector<std::string>> meas = {
        {"co2", "motion", "light", "temperature", "humidity", "battery"},
        {"sound_avg", "sound_peak", "motion", "light", "temperature"},
        {"pressure", "moisture", "battery"}};
    for (int i = 0; i < 500; ++i) {
      const std::size_t t = rng.below(3);
      mtc::RawReading r;
      r.device_id = "dev" + std::to_string(rng.below(40));
      r.sensor_type = types[t];
      r.measurement = meas[t][rng.below(meas[t].size())];
      r.timestamp_ms = rng.next_u64() % 2000000000000ull;
      readings.push_back(std::move(r));
    }
    std::ostringstream out;
    mtc::write_csv(out, readings);
    std::istringstream in(out.str());
    const auto parsed = mtc::parse_csv(in);
    CHECK(parsed.errors.empty());
    REQUIRE(parsed.readings.size() == readings.size());
    for (std::size_t i = 0; i < readings.size(); ++i) {
      CHECK(parsed.readings[i].device_id == readings[i].device_id);
      CHECK(parsed.readings[i].sensor_type == readings[i].sensor_type);
      CHECK(parsed.readings[i].measurement == readings[i].measurement);
      CHECK(parsed.readings[i].timestamp_ms == readings[i].timestamp_ms);
    }
  }
}

TEST_CASE("stream classification") {
  CHECK(mtc::classify_stream("co2") == mtc::TrafficClass::EventDriven);
  CHECK(mtc::classify_stream("sound_avg") == mtc::TrafficClass::EventDriven);
  CHECK(mtc::classify_stream("sound_peak") == mtc::TrafficClass::EventDriven);
  CHECK(mtc::classify_stream("motion") == mtc::TrafficClass::EventDriven);
  CHECK(mtc::classify_stream("temperature") == mtc::TrafficClass::QuasiPeriodic);
  CHECK(mtc::classify_stream("humidity") == mtc::TrafficClass::QuasiPeriodic);
  CHECK(mtc::classify_stream("pressure") == mtc::TrafficClass::QuasiPeriodic);
  CHECK(mtc::classify_stream("moisture") == mtc::TrafficClass::QuasiPeriodic);
  CHECK(mtc::classify_stream("light") == mtc::TrafficClass::QuasiPeriodic);
  CHECK(mtc::classify_stream("battery") == mtc::TrafficClass::QuasiPeriodic);
  SECTION("unknown names give an error listing the valid set") {
    try {
      mtc::classify_stream("radon");
      FAIL("expected InputError");
    } catch (const mtc::InputError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("radon") != std::string::npos);
      CHECK(msg.find("co2") != std::string::npos);
      CHECK(msg.find("temperature") != std::string::npos);
    }
  }
  SECTION("overrides change the mid-ambiguity streams") {
    const std::map<std::string, mtc::TrafficClass> overrides = {
        {"motion", mtc::TrafficClass::QuasiPeriodic}};
    CHECK(mtc::classify_stream("motion", overrides) == mtc::TrafficClass::QuasiPeriodic);
    CHECK(mtc::classify_stream("co2", overrides) == mtc::TrafficClass::EventDriven);
  }
}

TEST_CASE("readings to trace") {
  auto reading = [](std::uint64_t ts) {
    mtc::RawReading r;
    r.device_id = "dev";
    r.sensor_type = 'A';
    r.measurement = "co2";
    r.timestamp_ms = ts;
    return r;
  };
  SECTION("slot arithmetic") {
    const auto trace =
        mtc::readings_to_trace({reading(0), reading(900000), reading(1800000)}, 900000);
    REQUIRE(trace.transmissions.size() == 3);
    CHECK(trace.transmissions[0].start == 0);
    CHECK(trace.transmissions[1].start == 1);
    CHECK(trace.transmissions[2].start == 2);
    CHECK(trace.horizon == 3);
  }
  SECTION("same-slot readings collapse") {
    const auto trace = mtc::readings_to_trace({reading(100), reading(200)}, 900000);
    REQUIRE(trace.transmissions.size() == 1);
    CHECK(trace.transmissions[0].duration == 1);
  }
  SECTION("unsorted input is sorted internally") {
    const auto trace = mtc::readings_to_trace({reading(1800000), reading(0)}, 900000);
    REQUIRE(trace.transmissions.size() == 2);
    CHECK(trace.transmissions[0].start == 0);
  }
  SECTION("empty input") {
    const auto trace = mtc::readings_to_trace({}, 900000);
    CHECK(trace.transmissions.empty());
    CHECK(trace.horizon == 0);
  }
  CHECK_THROWS_AS(mtc::readings_to_trace({reading(1)}, 0), std::domain_error);
}

TEST_CASE("histograms") {
  SECTION("degenerate values widen to a unit-width bin") {
    const auto h = mtc::build_histogram({1, 1, 1}, mtc::FixedCount{1});
    REQUIRE(h.counts.size() == 1);
    CHECK(h.counts[0] == 3);
    double mass = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      mass += h.density[i] * (h.bin_edges[i + 1] - h.bin_edges[i]);
    }
    CHECK_THAT(mass, WithinAbs(1.0, 1e-12));
  }
  SECTION("fixed width") {
    const auto h = mtc::build_histogram({0, 1, 2, 3}, mtc::FixedWidth{2});
    REQUIRE(h.counts.size() == 2);
    CHECK(h.counts[0] == 2);
    CHECK(h.counts[1] == 2);
  }
  SECTION("density always integrates to one") {
    mtc::Rng rng(91);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> values;
      const std::size_t n = 1 + rng.below(500);
      for (std::size_t i = 0; i < n; ++i) values.push_back(rng.uniform(-5, 20));
      const mtc::BinRule rule = rep % 3 == 0   ? mtc::BinRule{mtc::AutoBins{}}
                                : rep % 3 == 1 ? mtc::BinRule{mtc::FixedCount{1 + rng.below(30)}}
                                               : mtc::BinRule{mtc::FixedWidth{rng.uniform(0.1, 3.0)}};
      const auto h = mtc::build_histogram(values, rule);
      double mass = 0.0;
      std::uint64_t count = 0;
      for (std::size_t i = 0; i < h.counts.size(); ++i) {
        mass += h.density[i] * (h.bin_edges[i + 1] - h.bin_edges[i]);
        count += h.counts[i];
      }
      CHECK_THAT(mass, WithinAbs(1.0, 1e-12));
      CHECK(count == values.size());
      for (std::size_t i = 0; i + 1 < h.bin_edges.size(); ++i) {
        CHECK(h.bin_edges[i] < h.bin_edges[i + 1]);
      }
    }
  }
  CHECK_THROWS_AS(mtc::build_histogram({}, mtc::AutoBins{}), std::domain_error);
}

TEST_CASE("config files") {
  SECTION("parsing, comments and lookups") {
    std::istringstream in(
        "# generator settings\n"
        "model = event_driven\n"
        "lambda_t = 0.25   # events per slot\n"
        "horizon = 5000\n"
        "\n");
    const auto cfg = mtc::Config::parse(in);
    CHECK(cfg.get_string("model") == "event_driven");
    CHECK(cfg.get_double("lambda_t") == 0.25);
    CHECK(cfg.get_u64("horizon") == 5000);
    CHECK(cfg.get_u64("missing", 7) == 7);
    CHECK_THROWS_AS(cfg.get_string("missing"), mtc::InputError);
    CHECK_NOTHROW(cfg.require_known({"model", "lambda_t", "horizon"}));
    CHECK_THROWS_AS(cfg.require_known({"model", "lambda_t"}), mtc::InputError);
  }
  SECTION("malformed lines") {
    std::istringstream bad1("novalue\n");
    CHECK_THROWS_AS(mtc::Config::parse(bad1), mtc::InputError);
    std::istringstream bad2("a = 1\na = 2\n");
    CHECK_THROWS_AS(mtc::Config::parse(bad2), mtc::InputError);
  }
  SECTION("number parsing") {
    std::istringstream in("x = 1.5e2\nn = 12\nbad = 1x\nneg = -4\n");
    const auto cfg = mtc::Config::parse(in);
    CHECK(cfg.get_double("x") == 150.0);
    CHECK(cfg.get_u64("n") == 12);
    CHECK_THROWS_AS(cfg.get_double("bad"), mtc::InputError);
    CHECK_THROWS_AS(cfg.get_u64("neg"), mtc::InputError);
    CHECK(cfg.get_double("neg") == -4.0);
  }
}
