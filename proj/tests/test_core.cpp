#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "mtc/core.hpp"
#include "mtc/gof.hpp"
#include "mtc/special.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("geometric burst pmf") {
  CHECK(mtc::geometric_pmf(0, 0.5) == 0.5);
  CHECK_THAT(mtc::geometric_pmf(2, 0.5), WithinRel(0.125, 1e-15));
  CHECK(mtc::geometric_pmf(0, 0.0) == 1.0);
  CHECK(mtc::geometric_pmf(5, 0.0) == 0.0);
  CHECK_THROWS_AS(mtc::geometric_pmf(1, 1.0), std::domain_error);
  CHECK_THROWS_AS(mtc::geometric_pmf(1, -0.1), std::domain_error);

  SECTION("pmf sums to one under truncation") {
    for (const double q : {0.1, 0.5, 0.9}) {
      double total = 0.0;
      std::uint64_t k = 0;
      while (total < 1.0 - 1e-13) total += mtc::geometric_pmf(k++, q);
      CHECK_THAT(total, WithinAbs(1.0, 1e-12));
    }
  }
}

TEST_CASE("burst duration sampling") {
  SECTION("q = 0 is always zero") {
    mtc::Rng rng(7);
    for (int i = 0; i < 100; ++i) CHECK(mtc::sample_burst_duration(0.0, rng) == 0);
  }
  SECTION("empirical mean matches q/(1-q)") {
    mtc::Rng rng(11);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(mtc::sample_burst_duration(0.5, rng));
    CHECK_THAT(sum / n, WithinAbs(1.0, 0.01));
  }
  SECTION("same seed gives the same sequence") {
    mtc::Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
      CHECK(mtc::sample_burst_duration(0.3, a) == mtc::sample_burst_duration(0.3, b));
    }
  }
  CHECK_THROWS_AS([] {
    mtc::Rng rng(1);
    mtc::sample_burst_duration(1.0, rng);
  }(), std::domain_error);
}

TEST_CASE("simulate_chain basics") {
  SECTION("p_activate = 0 never activates") {
    mtc::Rng rng(3);
    const auto trace = mtc::simulate_chain({0.0, 0.5, 0.0}, 1000, rng);
    CHECK(trace.transmissions.empty());
    trace.validate();
  }
  SECTION("p_activate = 1, q = 0 alternates idle/active from the idle start") {
    mtc::Rng rng(3);
    const auto trace = mtc::simulate_chain({1.0, 0.0, 0.0}, 10, rng);
    REQUIRE(trace.transmissions.size() == 5);
    for (std::size_t i = 0; i < trace.transmissions.size(); ++i) {
      CHECK(trace.transmissions[i].start == 2 * i + 1);
      CHECK(trace.transmissions[i].duration == 1);
    }
  }
  SECTION("trace invariants hold for random parameters") {
    mtc::Rng rng(99);
    for (int rep = 0; rep < 20; ++rep) {
      mtc::Rng chain_rng(rep);
      const auto trace =
          mtc::simulate_chain({0.05 + 0.9 * rng.uniform(), 0.9 * rng.uniform(), 1.0}, 500,
                              chain_rng);
      trace.validate();
    }
  }
}

TEST_CASE("simulate_chain stationary active fraction") {
  // two-state balance: pi_A = p / (p + 1 - q)
  const struct {
    double p, q;
  } cases[] = {{0.1, 0.5}, {0.3, 0.2}, {0.02, 0.8}};
  for (const auto& c : cases) {
    mtc::Rng rng(1234);
    const mtc::TimeSlot horizon = 1'000'000;
    const auto trace = mtc::simulate_chain({c.p, c.q, 0.0}, horizon, rng);
    std::uint64_t active = 0;
    for (const auto& t : trace.transmissions) active += t.duration;
    const double expected = c.p / (c.p + 1.0 - c.q);
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(horizon));
    // slot occupancies are positively correlated, so allow a generous factor
    // on top of the i.i.d. 3-sigma band
    CHECK_THAT(static_cast<double>(active) / static_cast<double>(horizon),
               WithinAbs(expected, 10.0 * sigma + 1e-4));
  }
}

TEST_CASE("simulate_chain sojourn law matches the geometric burst law") {
  // sojourn in Active is 1 + k with k geometric; chi-squared at alpha = 0.01
  for (const double q : {0.1, 0.5, 0.9}) {
    mtc::Rng rng(2024);
    std::map<std::uint64_t, std::uint64_t> sojourns;
    std::size_t activations = 0;
    mtc::TimeSlot horizon = 200'000;
    while (activations < 100'000) {
      const auto trace = mtc::simulate_chain({0.5, q, 0.0}, horizon, rng);
      const auto& txs = trace.transmissions;
      for (std::size_t i = 0; i + 1 < txs.size(); ++i) {  // last burst may be truncated
        ++sojourns[txs[i].duration];
        ++activations;
      }
    }
    // individual bins while the expected count stays >= 5, then one tail bin
    std::vector<double> observed, expected;
    const double n = static_cast<double>(activations);
    std::uint64_t d = 1;
    while (n * mtc::geometric_pmf(d - 1, q) >= 5.0 &&
           n * std::pow(q, static_cast<double>(d)) >= 5.0) {
      observed.push_back(sojourns.count(d) ? static_cast<double>(sojourns.at(d)) : 0.0);
      expected.push_back(n * mtc::geometric_pmf(d - 1, q));
      ++d;
    }
    double tail_obs = 0.0;
    for (const auto& [dur, count] : sojourns) {
      if (dur >= d) tail_obs += static_cast<double>(count);
    }
    observed.push_back(tail_obs);
    expected.push_back(n * std::pow(q, static_cast<double>(d - 1)));  // P(K+1 >= d)
    const double stat = mtc::chi_squared_statistic(observed, expected);
    const double crit =
        mtc::chi_squared_quantile(0.99, static_cast<double>(observed.size() - 1));
    INFO("q=" << q << " stat=" << stat << " crit=" << crit);
    CHECK(stat < crit);
  }
}

TEST_CASE("inter_arrival_times") {
  mtc::Trace trace;
  trace.horizon = 200;
  trace.device_id = "d";
  trace.transmissions = {{100, 1}, {130, 1}, {160, 1}};
  CHECK(mtc::inter_arrival_times(trace) == std::vector<std::uint64_t>{30, 30});

  trace.transmissions = {{5, 1}};
  CHECK(mtc::inter_arrival_times(trace).empty());

  trace.transmissions = {{5, 1}, {6, 1}, {106, 1}};
  CHECK(mtc::inter_arrival_times(trace) == std::vector<std::uint64_t>{1, 100});

  trace.transmissions.clear();
  CHECK(mtc::inter_arrival_times(trace).empty());

  SECTION("always strictly positive on simulated traces") {
    mtc::Rng rng(5);
    const auto t = mtc::simulate_chain({0.2, 0.6, 0.0}, 20000, rng);
    for (const auto gap : mtc::inter_arrival_times(t)) CHECK(gap > 0);
  }
}

TEST_CASE("trace validation rejects bad traces") {
  mtc::Trace bad;
  bad.horizon = 10;
  bad.transmissions = {{2, 3}, {4, 1}};  // overlap
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.transmissions = {{8, 5}};  // exceeds horizon
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.transmissions = {{3, 0}};  // zero duration
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
