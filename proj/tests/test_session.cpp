#include <doctest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "photoauth/errors.hpp"
#include "photoauth/protocol_math.hpp"
#include "photoauth/session.hpp"

using namespace photoauth;

namespace {

ClassifiedMap ideal_map(int side = 5) {
  return classify(checkerboard_map(side, 0.16, 0.04), 0.10, 0.05);
}

Scripted script(const std::string& text) {
  std::istringstream in(text);
  return Scripted::parse(in);
}

bool within_sigmas(double observed_rate, double p, double trials, double k = 3.0) {
  return std::abs(observed_rate - p) <= k * std::sqrt(p * (1 - p) / trials);
}

void check_trajectory(const SessionRecord& r, const SessionOptions& o) {
  REQUIRE(!r.s_trajectory.empty());
  CHECK(r.s_trajectory.front() == 0);
  CHECK(r.s_trajectory.size() == static_cast<std::size_t>(r.round_count) + 1);
  for (std::size_t i = 1; i < r.s_trajectory.size(); ++i) {
    CHECK(std::abs(r.s_trajectory[i] - r.s_trajectory[i - 1]) == 1);
    if (i + 1 < r.s_trajectory.size()) {
      CHECK(r.s_trajectory[i] < o.s_plus);
      CHECK(r.s_trajectory[i] > o.s_minus);
    }
  }
  const int last = r.s_trajectory.back();
  CHECK((last == o.s_plus || last == o.s_minus));
  CHECK((r.outcome == Outcome::authenticated) == (last == o.s_plus));
}

}  // namespace

TEST_CASE("sample_h") {
  SUBCASE("N = 1 is a fair coin") {
    SplitMix64 rng(1);
    long ones = 0;
    for (int i = 0; i < 1'000'000; ++i) {
      const int h = sample_h(1, rng);
      REQUIRE((h == 0 || h == 1));
      ones += h;
    }
    CHECK(within_sigmas(ones / 1e6, 0.5, 1e6));
  }
  SUBCASE("N = 6 passes a chi-square test on 7 bins") {
    SplitMix64 rng(2);
    std::array<long, 7> bins{};
    const int draws = 1'000'000;
    for (int i = 0; i < draws; ++i) ++bins.at(static_cast<std::size_t>(sample_h(6, rng)));
    double chi2 = 0.0;
    for (long b : bins) chi2 += (b - draws / 7.0) * (b - draws / 7.0) / (draws / 7.0);
    CHECK(chi2 < 22.458);  // chi-square, 6 degrees of freedom, p = 0.001
  }
  SUBCASE("fixed seed gives a fixed sequence") {
    SplitMix64 a(77), b(77);
    for (int i = 0; i < 1000; ++i) CHECK(sample_h(6, a) == sample_h(6, b));
  }
  SplitMix64 rng(0);
  CHECK_THROWS_AS(sample_h(0, rng), DomainError);
}

TEST_CASE("Eve's success rate is 1/(N+1) for any strategy") {
  const int rounds = 1'000'000;
  auto rate = [&](int n, const EveStrategy& strategy, std::uint64_t seed) {
    SplitMix64 device(seed);
    SplitMix64 eve(seed + 1);
    long hits = 0;
    for (int i = 0; i < rounds; ++i) {
      const int h = sample_h(n, device);
      hits += eve_response(EveView{n}, strategy, eve) == h;
    }
    return hits / static_cast<double>(rounds);
  };
  CHECK(within_sigmas(rate(6, FixedMode{0}, 10), 1.0 / 7.0, rounds));
  CHECK(within_sigmas(rate(6, UniformRandom{}, 11), 1.0 / 7.0, rounds));
  CHECK(within_sigmas(rate(6, ModeSet{{2, 5}}, 12), 1.0 / 7.0, rounds));
  CHECK(within_sigmas(rate(1, FixedMode{1}, 13), 0.5, rounds));

  SplitMix64 rng(0);
  CHECK_THROWS_AS(eve_response(EveView{6}, FixedMode{7}, rng), DomainError);
  CHECK_THROWS_AS(eve_response(EveView{6}, ModeSet{{}}, rng), DomainError);
}

TEST_CASE("Alice's responses") {
  SplitMix64 rng(5);
  const std::vector<double> ones(6, 1.0), zeros(6, 0.0);
  for (int i = 0; i < 1000; ++i) {
    CHECK(alice_response(ones, LightSource::single_photon(60), PerceptionModel{6}, rng) == 6);
    CHECK(alice_response(zeros, LightSource::coherent(60), PerceptionModel{6}, rng) == 0);
  }

  SUBCASE("per-spot miss and false rates match the closed form") {
    const auto source = LightSource::coherent(69.4);
    const SimAlice alice(checkerboard_map(5, 0.16, 0.04), source, PerceptionModel{6});
    const auto rates = miss_and_false_probs(source, 0.16, 0.04, 6);
    const int draws = 1'000'000;
    long misses = 0;
    long false_hits = 0;
    for (int i = 0; i < draws; ++i) {
      misses += alice.draw_detected(0, rng) < 6;   // spot (0,0): high
      false_hits += alice.draw_detected(1, rng) >= 6;  // spot (0,1): low
    }
    CHECK(within_sigmas(misses / double(draws), rates.p_high_miss, draws));
    CHECK(within_sigmas(false_hits / double(draws), rates.p_low_false, draws));
  }
  SUBCASE("round success converges to P_A") {
    const auto source = LightSource::single_photon(68);
    const auto map = ideal_map();
    const SimAlice alice(map.source, source, PerceptionModel{6});
    const double pa =
        alice_round_success(6, miss_and_false_probs(source, 0.16, 0.04, 6).u);
    SplitMix64 device(8);
    const int rounds = 1'000'000;
    long hits = 0;
    std::vector<std::size_t> lit;
    for (int i = 0; i < rounds; ++i) {
      const int h = sample_h(6, device);
      lit.assign(map.high_spots.begin(), map.high_spots.begin() + h);
      lit.insert(lit.end(), map.low_spots.begin(), map.low_spots.begin() + (6 - h));
      hits += alice.respond(lit, rng) == h;
    }
    CHECK(within_sigmas(hits / double(rounds), pa, rounds));
  }
}

TEST_CASE("scripted subjects") {
  const auto map = ideal_map();
  SessionOptions o;
  SUBCASE("always correct authenticates in exactly S+ rounds") {
    std::string text;
    for (int i = 0; i < 13; ++i) text += "correct\n";
    const auto r = run_session(script(text), o, map, 1);
    CHECK(r.outcome == Outcome::authenticated);
    CHECK(r.round_count == 13);
    check_trajectory(r, o);
    for (const auto& round : r.rounds) CHECK(round.correct);
  }
  SUBCASE("always wrong is rejected in exactly |S-| rounds") {
    std::string text;
    for (int i = 0; i < 13; ++i) text += "wrong\n";
    const auto r = run_session(script(text), o, map, 1);
    CHECK(r.outcome == Outcome::rejected);
    CHECK(r.round_count == 13);
    check_trajectory(r, o);
  }
  SUBCASE("literal answers are scored against H") {
    o.s_plus = 1;
    o.s_minus = -1;
    const auto r = run_session(script("3  # a guess"), o, map, 99);
    REQUIRE(r.rounds.size() == 1);
    CHECK(r.rounds[0].response == 3);
    CHECK(r.rounds[0].correct == (r.rounds[0].h == 3));
  }
  SUBCASE("running out of script is an error") {
    CHECK_THROWS_AS(run_session(script("correct\ncorrect"), o, map, 1), ScriptExhaustedError);
  }
  SUBCASE("parse errors") {
    CHECK_THROWS_AS(script("correct\nmaybe\n"), ParseError);
    CHECK_THROWS_AS(script("-2"), ParseError);
    try {
      script("correct\n\nmaybe\n");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
}

TEST_CASE("session guards") {
  SessionOptions o;
  o.n_spots = 14;
  CHECK_THROWS_AS(run_session(SimEve{}, o, ideal_map(), 1), InsufficientSpotsError);
  o = {};
  o.max_rounds = 5;
  CHECK_THROWS_AS(run_session(SimEve{}, o, ideal_map(), 1), NonAbsorptionError);
  o = {};
  o.s_minus = 0;
  CHECK_THROWS_AS(run_session(SimEve{}, o, ideal_map(), 1), DomainError);
}

TEST_CASE("lit spots respect H and the class partition") {
  const auto map = ideal_map();
  const SimAlice alice(map.source, LightSource::coherent(69.4), PerceptionModel{6});
  const auto records = simulate_sessions(alice, SessionOptions{}, map, 200, 3);
  SessionOptions o;
  for (const auto& r : records) {
    check_trajectory(r, o);
    CHECK(r.rounds.size() == static_cast<std::size_t>(r.round_count));
    for (const auto& round : r.rounds) {
      CHECK(round.lit_spots.size() == 6);
      int high = 0;
      for (std::size_t i = 0; i < round.lit_spots.size(); ++i) {
        const auto& s = round.lit_spots[i];
        CHECK(map.class_of(s.index) == s.spot_class);
        high += s.spot_class == SpotClass::high;
        if (i > 0) CHECK(round.lit_spots[i - 1].index < s.index);
      }
      CHECK(high == round.h);
      CHECK(round.correct == (round.response == round.h));
    }
  }
}

TEST_CASE("determinism") {
  const auto map = ideal_map();
  const SimAlice alice(map.source, LightSource::coherent(69.4), PerceptionModel{6});
  SessionOptions o;
  CHECK(run_session(alice, o, map, 1234) == run_session(alice, o, map, 1234));
  CHECK_FALSE(run_session(alice, o, map, 1234) == run_session(alice, o, map, 1235));

  const auto one = simulate_sessions(alice, o, map, 1, 42);
  const auto many = simulate_sessions(alice, o, map, 1000, 42);
  CHECK(one.front() == many.front());
  CHECK(many.front() == run_session(alice, o, map, derive_seed(42, 0)));
  CHECK(simulate_sessions(alice, o, map, 300, 42, 3) ==
        std::vector<SessionRecord>(many.begin(), many.begin() + 300));

  o.record_rounds = false;
  const auto a = monte_carlo(SimEve{}, o, map, 5000, 9, 1);
  const auto b = monte_carlo(SimEve{}, o, map, 5000, 9, 4);
  CHECK(a.accepted == b.accepted);
  CHECK(a.mean_rounds == b.mean_rounds);
  CHECK(a.sd_rounds == b.sd_rounds);
}

TEST_CASE("statistics merge is associative and commutative") {
  const auto map = ideal_map();
  SessionOptions o;
  o.s_plus = 3;
  o.s_minus = -3;
  const auto records = simulate_sessions(SimEve{}, o, map, 90, 4);
  SessionStats whole, x, y, z;
  for (std::size_t i = 0; i < records.size(); ++i) {
    whole.add(records[i]);
    (i % 3 == 0 ? x : i % 3 == 1 ? y : z).add(records[i]);
  }
  SessionStats left = x, right = z;
  left.merge(y);
  left.merge(z);
  right.merge(y);
  right.merge(x);
  for (const auto& s : {left, right}) {
    CHECK(s.sessions == whole.sessions);
    CHECK(s.accepted == whole.accepted);
    CHECK(s.sum_rounds == whole.sum_rounds);
    CHECK(s.sum_sq_rounds == whole.sum_sq_rounds);
  }
}

TEST_CASE("summary and CSV output") {
  SessionStats s;
  s.sessions = 4;
  s.accepted = 3;
  s.rejected = 1;
  s.sum_rounds = 40;
  s.sum_sq_rounds = 412;
  const auto m = MonteCarloSummary::from(s);
  CHECK(m.acceptance_rate == 0.75);
  CHECK(m.mean_rounds == 10.0);
  CHECK(m.sd_rounds == doctest::Approx(std::sqrt(4.0)));  // sample variance (412 - 400) / 3
  CHECK(m.ci95_low == doctest::Approx(10.0 - 1.959963984540054 * 2.0 / 2.0));

  std::ostringstream out;
  write_summary_csv(out, m);
  CHECK(out.str().rfind("sessions,accepted,rejected,mean_rounds,sd_rounds,ci95_low,ci95_high\n4,3,1,10,", 0) == 0);

  SessionOptions o;
  o.s_plus = 1;
  o.s_minus = -1;
  const auto records = simulate_sessions(script("correct"), o, ideal_map(), 1, 0);
  std::ostringstream trace;
  write_trace_csv(trace, records);
  const std::string h = std::to_string(records[0].rounds[0].h);
  CHECK(trace.str() == "session_id,round,H,response,correct,S\n0,1," + h + "," + h + ",1,1\n");
}
