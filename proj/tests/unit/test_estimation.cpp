#include <doctest.h>

#include <cmath>
#include <sstream>

#include "opsim/estimation.hpp"
#include "oracles.hpp"

using namespace opsim;

namespace {

constexpr auto H = MobilityState::Home;
constexpr auto W = MobilityState::Work;
constexpr auto P = MobilityState::Poi;

ActivityLog parse(const std::string& text) {
  std::istringstream in(text);
  return read_activity_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

const PeriodSchedule kWholeDay({{1, 0, 0}});

}  // namespace

TEST_CASE("discretize samples at interval starts") {
  const auto log = parse(
      "individual_id,group,start_hhmm,end_hhmm,state\n"
      "a,ES,08:00,12:00,work\n");
  const auto seq = discretize(log, 30);
  REQUIRE(seq.size() == 1);
  CHECK(seq[0].first_slot == 16);
  CHECK(seq[0].states == std::vector<MobilityState>(8, W));

  const auto day = discretize(parse("b,CUA,00:00,12:00,home\nb,CUA,12:00,24:00,poi\n"), 30);
  std::vector<MobilityState> expect(24, H);
  expect.insert(expect.end(), 24, P);
  CHECK(day[0].states == expect);

  const auto shifted = discretize(parse("c,ES,07:00,08:15,home\nc,ES,08:15,09:00,work\n"), 30);
  CHECK(shifted[0].states == std::vector<MobilityState>{H, H, H, W});
}

TEST_CASE("records that wrap midnight continue into the next day") {
  const auto log = parse("a,ES,22:00,06:00,home\na,ES,06:00,09:00,work\n");
  REQUIRE(log[0].records.size() == 2);
  CHECK(log[0].records[0].end_minute - log[0].records[0].start_minute == 8 * 60);
  CHECK(discretize(log, 60)[0].states.size() == 11);
}

TEST_CASE("malformed logs cite the line") {
  const std::string header = "individual_id,group,start_hhmm,end_hhmm,state\n";
  CHECK(error_of(header + "a,ES,08:00,12:00,work\na,ES,11:00,13:00,home\n").find("line 3") != std::string::npos);
  CHECK(error_of(header + "a,ES,08:00,12:00,work\na,ES,12:30,13:00,home\n").find("gap") != std::string::npos);
  CHECK(error_of(header + "a,CUA,08:00,12:00,work\n").find("line 2") != std::string::npos);
  CHECK(error_of(header + "a,ES,08:00,12:00\n").find("line 2") != std::string::npos);
  CHECK(error_of(header + "a,ES,08:00,08:00,home\n").find("zero length") != std::string::npos);
  CHECK(error_of(header + "a,XY,08:00,09:00,home\n").find("line 2") != std::string::npos);
}

TEST_CASE("counting example") {
  const std::vector<StateSequence> seqs{{"a", ClassGroup::CUA, 0, {H, H, P, H}}};
  const auto est = estimate_matrices(seqs, kWholeDay, 30);
  const auto& m = est.matrices.get(1, ClassGroup::CUA).transition;
  CHECK(m[0] == Probabilities{0.5, 0, 0.5});
  CHECK(m[2] == Probabilities{1, 0, 0});
  CHECK(m[1] == Probabilities{0, 1, 0});  // unseen row falls back to identity
  CHECK_FALSE(est.matrices.contains(1, ClassGroup::ES));
  CHECK_FALSE(est.warnings.empty());
}

TEST_CASE("pooling weights individuals by count") {
  const StateSequence a{"a", ClassGroup::ES, 0, {H, W, W, P, H, H, W}};
  const StateSequence b{"b", ClassGroup::ES, 0, {H, W, W, P, H, H, W}};
  const std::vector<StateSequence> one{a}, two{a, b};
  CHECK(estimate_matrices(one, kWholeDay, 30).matrices == estimate_matrices(two, kWholeDay, 30).matrices);
}

TEST_CASE("transitions are attributed to the period of their source slot") {
  const PeriodSchedule two_halves({{1, 0, 720}, {2, 720, 0}});
  // Slots of 12 h: slot 0 in period 1, slot 1 in period 2.
  const std::vector<StateSequence> seqs{{"a", ClassGroup::ES, 0, {H, W, P}}};
  const auto est = estimate_matrices(seqs, two_halves, 720);
  CHECK(est.matrices.get(1, ClassGroup::ES).transition[0] == Probabilities{0, 1, 0});
  CHECK(est.matrices.get(2, ClassGroup::ES).transition[1] == Probabilities{0, 0, 1});
  CHECK(est.matrices.get(1, ClassGroup::ES).initial == Probabilities{0.5, 0, 0.5});
  CHECK(est.matrices.get(2, ClassGroup::ES).initial == Probabilities{0, 1, 0});
}

TEST_CASE("synthesized logs round trip through CSV") {
  oracle::Gen gen(31);
  for (int trial = 0; trial < 30; ++trial) {
    StateSequence seq{"p" + std::to_string(trial), gen.coin() ? ClassGroup::ES : ClassGroup::CUA,
                      gen.integer(0, 100), {}};
    for (int i = 0, n = gen.integer(1, 200); i < n; ++i) {
      int s = gen.integer(0, 2);
      if (seq.group == ClassGroup::CUA && s == 1) s = 0;
      seq.states.push_back(static_cast<MobilityState>(s));
    }
    const int interval = std::array{15, 30, 60}[gen.integer(0, 2)];
    std::ostringstream out;
    write_activity_csv(out, {synthesize_log(seq, interval)});
    std::istringstream in(out.str());
    const auto back = discretize(read_activity_csv(in), interval);
    REQUIRE(back.size() == 1);
    CAPTURE(trial);
    CHECK(back[0].states == seq.states);
    CHECK(back[0].first_slot % (1440 / interval) == seq.first_slot % (1440 / interval));
  }
}

TEST_CASE("estimates converge to the generating chain") {
  const Matrix3 truth{{{0.7, 0.2, 0.1}, {0.15, 0.8, 0.05}, {0.3, 0.1, 0.6}}};
  auto run = [&](int transitions, std::uint64_t seed) {
    oracle::Gen gen(seed);
    StateSequence seq{"x", ClassGroup::ES, 0, {H}};
    for (int i = 0; i < transitions; ++i) {
      const auto& row = truth[static_cast<int>(seq.states.back())];
      seq.states.push_back(sample_state(row, gen.real(0, 1)));
    }
    const std::vector<StateSequence> seqs{seq};
    return estimate_matrices(seqs, kWholeDay, 30).matrices.get(1, ClassGroup::ES).transition;
  };
  auto max_error = [&](const Matrix3& m) {
    double e = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) e = std::max(e, std::abs(m[i][j] - truth[i][j]));
    return e;
  };
  CHECK(max_error(run(100000, 5)) < max_error(run(1000, 5)));
  CHECK(max_error(run(50000, 6)) <= 0.02);
}

TEST_CASE("matrix averaging differs from pooling only in weighting") {
  const StateSequence a{"a", ClassGroup::ES, 0, {H, H, H, H, P}};
  const StateSequence b{"b", ClassGroup::ES, 0, {H, P}};
  const std::vector<StateSequence> seqs{a, b};
  const auto pooled = estimate_matrices(seqs, kWholeDay, 30, Aggregation::PooledCounts);
  const auto averaged = estimate_matrices(seqs, kWholeDay, 30, Aggregation::MatrixAverage);
  const auto hp = pooled.matrices.get(1, ClassGroup::ES).transition[0];
  const auto ha = averaged.matrices.get(1, ClassGroup::ES).transition[0];
  CHECK(hp[0] == doctest::Approx(3.0 / 5));
  CHECK(ha[0] == doctest::Approx((3.0 / 4 + 0.0) / 2));
}
