#include <gtest/gtest.h>

#include <array>
#include <cstdlib>
#include <random>
#include <vector>

#include "hidjam/hiding_metric.hpp"

using namespace hidjam;
using Seq = std::vector<Channel>;

namespace {

// Naive reference straight from the definition: count every candidate offset K,
// rho is the best count over the window length. Out-of-range or kNone partners
// never match.
struct Reference {
  int bias;
  double rho;
};

Reference reference(const Seq& x, const Seq& y, int m, int max_channel) {
  const int L = static_cast<int>(x.size());
  int best_k = kNoBias, best = 0;
  for (int k = -(max_channel - 1); k <= max_channel - 1; ++k) {
    int count = 0;
    for (int n = 0; n < L; ++n) {
      const int j = n + m;
      if (j < 0 || j >= static_cast<int>(y.size())) continue;
      if (x[n] == kNone || y[j] == kNone) continue;
      count += (x[n] - y[j] == k);
    }
    if (count == 0) continue;
    if (count > best || (count == best && std::abs(k) < std::abs(best_k))) {
      best = count;
      best_k = k;
    }
  }
  return {best_k, static_cast<double>(best) / L};
}

Seq decode(int code, int len, int channels) {
  Seq s(len);
  for (int i = 0; i < len; ++i) {
    s[i] = 1 + code % channels;
    code /= channels;
  }
  return s;
}

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

TEST(DistanceBias, ConstantOffset) {
  const Seq x{3, 5, 2, 7}, y{4, 6, 3, 8};
  EXPECT_EQ(distance_bias(x, y, 0), -1);
}

TEST(DistanceBias, ModeIgnoresOutlier) {
  const Seq x{1, 2, 3, 4, 5}, y{1, 2, 9, 4, 5};
  EXPECT_EQ(distance_bias(x, y, 0), 0);
  EXPECT_DOUBLE_EQ(rho(x, y, 0), 0.8);
}

TEST(DistanceBias, TieBreaks) {
  // offsets {2, -2}: equal |K|, smaller signed wins
  EXPECT_EQ(distance_bias(Seq{3, 1}, Seq{1, 3}, 0), -2);
  // offsets {1, -3}: smaller |K| wins
  EXPECT_EQ(distance_bias(Seq{2, 1}, Seq{1, 4}, 0), 1);
  // offsets {-2, 1, 1, -2}
  EXPECT_EQ(distance_bias(Seq{1, 3, 3, 1}, Seq{3, 2, 2, 3}, 0), 1);
}

TEST(DistanceBias, TieRuleMatchesEnumeration) {
  // Every tied pair of length 4 over 4 channels: the winner has the smallest |K|,
  // then the smallest K, among the tied modes.
  int ties = 0;
  for (int a = 0; a < ipow(4, 4); ++a)
    for (int b = 0; b < ipow(4, 4); ++b) {
      const Seq x = decode(a, 4, 4), y = decode(b, 4, 4);
      std::array<int, 7> counts{};
      for (int i = 0; i < 4; ++i) ++counts[x[i] - y[i] + 3];
      const int top = *std::max_element(counts.begin(), counts.end());
      std::vector<int> modes;
      for (int k = -3; k <= 3; ++k)
        if (counts[k + 3] == top) modes.push_back(k);
      if (modes.size() < 2) continue;
      ++ties;
      int want = modes[0];
      for (int k : modes)
        if (std::abs(k) < std::abs(want) || (std::abs(k) == std::abs(want) && k < want)) want = k;
      ASSERT_EQ(distance_bias(x, y, 0), want);
    }
  EXPECT_GT(ties, 0);
}

TEST(DistanceBias, AllSentinelsGiveNoBias) {
  const Seq x{1, 2, 3}, y{kNone, kNone, kNone};
  EXPECT_EQ(distance_bias(x, y, 0), kNoBias);
  EXPECT_EQ(rho(x, y, 0), 0.0);
}

TEST(Rho, DelayedCopyIsPerfect) {
  const Seq x{4, 1, 7, 7, 2, 9, 3, kNone};
  Seq y(x.size(), kNone);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) y[i + 1] = x[i];
  EXPECT_DOUBLE_EQ(rho(x, y, 1, {0, 7}), 1.0);
  EXPECT_DOUBLE_EQ(max_correlation(x, y, {0, 5}, {0, 7}), 1.0);
}

TEST(Rho, SelfCorrelationIsOne) {
  std::mt19937 rng(4);
  for (int t = 0; t < 100; ++t) {
    Seq x(10);
    for (auto& c : x) c = 1 + static_cast<int>(rng() % 10);
    EXPECT_DOUBLE_EQ(rho(x, x, 0), 1.0);
  }
}

TEST(Rho, ConstantSequencesCorrelateAtEveryLag) {
  const Seq x(12, 3), y(12, 8);
  for (int m = 0; m <= 2; ++m) EXPECT_DOUBLE_EQ(rho(x, y, m, {0, 10}), 1.0);
}

TEST(Rho, SentinelPairsAreMismatches) {
  const Seq x{1, 2, kNone, 4}, y{1, 2, 3, kNone};
  EXPECT_DOUBLE_EQ(rho(x, y, 0), 0.5);
}

TEST(Rho, ShiftInvariance) {
  std::mt19937 rng(11);
  for (int t = 0; t < 500; ++t) {
    Seq x(10), y(15);
    for (auto& c : x) c = 1 + static_cast<int>(rng() % 10);
    for (auto& c : y) c = 1 + static_cast<int>(rng() % 7);
    const int shift = static_cast<int>(rng() % 4);
    Seq z = y;
    for (auto& c : z) c += shift;
    for (int m = 0; m <= 5; ++m) ASSERT_DOUBLE_EQ(rho(x, y, m), rho(x, z, m));
  }
}

TEST(Rho, ExhaustiveAgainstReference) {
  // all X, Y of length <= 5 over 3 channels and lags -2..2; sentinels included
  // by letting channel code 0 stand for kNone on length-3 sequences.
  for (int len = 1; len <= 5; ++len) {
    const int total = ipow(3, len);
    for (int a = 0; a < total; ++a)
      for (int b = 0; b < total; ++b) {
        const Seq x = decode(a, len, 3), y = decode(b, len, 3);
        for (int m = -2; m <= 2; ++m) {
          const auto ref = reference(x, y, m, 3);
          ASSERT_EQ(distance_bias(x, y, m), ref.bias);
          ASSERT_DOUBLE_EQ(rho(x, y, m), ref.rho);
        }
      }
  }
  for (int a = 0; a < ipow(4, 3); ++a)
    for (int b = 0; b < ipow(4, 3); ++b) {
      Seq x = decode(a, 3, 4), y = decode(b, 3, 4);
      for (auto* s : {&x, &y})
        for (auto& c : *s) c = c == 4 ? kNone : c;
      for (int m = -1; m <= 1; ++m) ASSERT_DOUBLE_EQ(rho(x, y, m), reference(x, y, m, 3).rho);
    }
}

TEST(MaxCorrelation, ExhaustiveLengthFourThreeChannels) {
  const LagRange lags{-3, 3};
  for (int a = 0; a < 81; ++a)
    for (int b = 0; b < 81; ++b) {
      const Seq x = decode(a, 4, 3), y = decode(b, 4, 3);
      double best = 0;
      for (int m = lags.min_lag; m <= lags.max_lag; ++m) {
        const double r = reference(x, y, m, 3).rho;
        ASSERT_EQ(rho(x, y, m), r);
        best = std::max(best, r);
      }
      ASSERT_EQ(max_correlation(x, y, lags), best);
    }
}

TEST(MaxCorrelation, RangeChecks) {
  const Seq x{1, 2, 3};
  EXPECT_THROW(max_correlation(x, x, {2, 1}), std::domain_error);
  EXPECT_THROW((LagRange{0, 10}.validate(10)), std::domain_error);
  EXPECT_NO_THROW((LagRange{-9, 9}.validate(10)));
}

TEST(MaxCorrelation, UpperBoundsEveryLag) {
  std::mt19937 rng(7);
  for (int t = 0; t < 200; ++t) {
    Seq x(15), y(15);
    for (auto& c : x) c = 1 + static_cast<int>(rng() % 10);
    for (auto& c : y) c = rng() % 11 == 0 ? kNone : 1 + static_cast<int>(rng() % 10);
    const double r = max_correlation(x, y, {0, 5}, {0, 10});
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
    for (int m = 0; m <= 5; ++m) EXPECT_GE(r, rho(x, y, m, {0, 10}));
  }
}

TEST(Rho, IndependentSequencesStayLow) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> ch(1, 10);
  int low = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    Seq x(10), y(10);
    for (auto& c : x) c = ch(rng);
    for (auto& c : y) c = ch(rng);
    low += rho(x, y, 0) < 0.5;
  }
  // five or more pairs on one offset: about 0.6% for independent uniform draws
  EXPECT_GE(low, 0.99 * trials);
}

TEST(ActionHistory, RingOrder) {
  ActionHistory h(3);
  EXPECT_EQ(h.chronological(), (Seq{kNone, kNone, kNone}));
  EXPECT_EQ(h.latest(), kNone);
  for (Channel c : {1, 2, 3, 4}) h.push(c);
  EXPECT_EQ(h.chronological(), (Seq{2, 3, 4}));
  EXPECT_EQ(h.latest(), 4);
  EXPECT_EQ(h.size(), 3u);
}

TEST(HistoryCorrelation, FollowerReachesOneAfterFill) {
  const CorrelationConfig cfg{10, {0, 5}};
  ActionHistory user(cfg.history_capacity()), jam(cfg.history_capacity());
  std::mt19937 rng(3);
  Channel prev = kNone;
  for (int t = 0; t < 40; ++t) {
    const Channel u = 1 + static_cast<int>(rng() % 10);
    user.push(u);
    jam.push(prev);
    prev = u;
    const double r = history_correlation(user, jam, cfg);
    if (t >= static_cast<int>(cfg.history_capacity())) {
      EXPECT_EQ(r, 1.0) << t;
    }
    if (t < 5) {
      EXPECT_EQ(r, 0.0);
    }
  }
}

TEST(HistoryCorrelation, AbsentJammerIsZero) {
  const CorrelationConfig cfg{};
  ActionHistory user(cfg.history_capacity()), jam(cfg.history_capacity());
  for (int t = 0; t < 50; ++t) {
    user.push(1 + t % 10);
    jam.push(kNone);
    EXPECT_EQ(history_correlation(user, jam, cfg), 0.0);
  }
}
