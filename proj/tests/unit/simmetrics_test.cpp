// Copyright 2026 The embprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "embprobe/simmetrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "embprobe/error.hpp"
#include "embprobe/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace embprobe {
namespace {

using testing_support::MakeDataset;
using testing_support::Speaker;

std::vector<Speaker> RandomSpeakers(int n_speakers, int utts, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Speaker> out;
  for (int s = 0; s < n_speakers; ++s) {
    Speaker sp;
    sp.id = "spk" + std::to_string(100 + s);
    sp.gender = s % 2 ? Gender::kMale : Gender::kFemale;
    sp.subset = s % 3 ? "home" : "studio";
    std::vector<float> centre(static_cast<std::size_t>(dim));
    for (float &c : centre) c = static_cast<float>(rng.Normal());
    for (int u = 0; u < utts; ++u) {
      std::vector<float> v = centre;
      for (float &c : v) c += static_cast<float>(0.3 * rng.Normal());
      sp.vectors.push_back(v);
    }
    out.push_back(sp);
  }
  return out;
}

TEST(Cosine, Examples) {
  const std::vector<double> x = {1, 0, 0}, a = {1, 0}, b = {0, 1}, c = {1, 1};
  EXPECT_DOUBLE_EQ(Cosine(x, x), 1.0);
  EXPECT_DOUBLE_EQ(Cosine(a, b), 0.0);
  EXPECT_NEAR(Cosine(c, a), 0.7071067811865475, 1e-15);
}

TEST(Cosine, Errors) {
  const std::vector<double> a = {1, 0}, z = {0, 0}, d3 = {1, 2, 3};
  EXPECT_THROW(Cosine(a, d3), Error);
  try {
    Cosine(a, z);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVector);
  }
}

TEST(CosineProperty, ScaleInvariantAndSymmetric) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(8), b(8), scaled(8);
    for (auto &v : a) v = rng.Normal();
    for (auto &v : b) v = rng.Normal();
    const double k = rng.Uniform(0.01, 100.0);
    for (std::size_t j = 0; j < a.size(); ++j) scaled[j] = k * a[j];
    const double ab = Cosine(a, b);
    EXPECT_NEAR(Cosine(scaled, b), ab, 1e-12);
    EXPECT_DOUBLE_EQ(Cosine(b, a), ab);
    EXPECT_LE(std::abs(ab), 1.0);
  }
}

TEST(Trials, TwoByTwoForcedQuota) {
  const auto ds = MakeDataset({{"A", Gender::kFemale, "a", {{1, 0}, {1, 1}}},
                               {"B", Gender::kFemale, "a", {{0, 1}, {1, 2}}}});
  const auto t = SampleTrials(ds, 1, 1, 5);
  ASSERT_EQ(t.trials.size(), 2u);
  EXPECT_EQ(t.CountSame(), 2u);
}

TEST(Trials, QuotasAreExactAndPairsUnique) {
  const auto ds = MakeDataset(RandomSpeakers(12, 15, 4, 1));
  const auto t = SampleTrials(ds, 60, 12, 99);
  EXPECT_EQ(t.trials.size(), 12u * 60u);
  EXPECT_EQ(t.CountSame(), 12u * 12u);
  std::vector<int> anchored(ds.speakers().size()), same(ds.speakers().size());
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto &tr : t.trials) {
    EXPECT_NE(tr.a, tr.b);
    EXPECT_EQ(tr.same_speaker, ds.speaker_of(tr.a) == ds.speaker_of(tr.b));
    ++anchored[ds.speaker_of(tr.a)];
    same[ds.speaker_of(tr.a)] += tr.same_speaker;
    EXPECT_TRUE(pairs.insert({std::min(tr.a, tr.b), std::max(tr.a, tr.b)}).second);
  }
  for (std::size_t s = 0; s < anchored.size(); ++s) {
    EXPECT_EQ(anchored[s], 60);
    EXPECT_EQ(same[s], 12);
  }
}

TEST(Trials, DeterministicPerSeed) {
  const auto ds = MakeDataset(RandomSpeakers(5, 10, 3, 2));
  EXPECT_EQ(SampleTrials(ds, 20, 5, 7), SampleTrials(ds, 20, 5, 7));
  EXPECT_NE(SampleTrials(ds, 20, 5, 7).trials, SampleTrials(ds, 20, 5, 8).trials);
}

TEST(Trials, Errors) {
  const auto ds = MakeDataset(RandomSpeakers(3, 4, 3, 2));
  auto code = [&](int per, int same) {
    try {
      SampleTrials(ds, per, same, 1);
    } catch (const Error &e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code(10, 7), ErrorCode::kInsufficientPairs);  // C(4,2) = 6
  EXPECT_EQ(code(3, 4), ErrorCode::kInvalidArgument);
}

TEST(Trials, FileRoundTrip) {
  testing_support::TempDir dir;
  const auto ds = MakeDataset(RandomSpeakers(4, 6, 3, 4));
  const auto t = SampleTrials(ds, 10, 3, 11);
  WriteTrials(t, ds, dir / "t.csv", dir / "t.json");
  EXPECT_EQ(ReadTrials(ds, dir / "t.csv", dir / "t.json"), t);
  const std::string csv = testing_support::ReadFile(dir / "t.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "key_a,key_b,same_speaker");
}

TEST(Trials, ReadRejectsWrongSameFlag) {
  testing_support::TempDir dir;
  const auto ds = MakeDataset(RandomSpeakers(2, 3, 2, 4));
  const auto t = SampleTrials(ds, 2, 1, 1);
  WriteTrials(t, ds, dir / "t.csv", dir / "t.json");
  std::string csv = testing_support::ReadFile(dir / "t.csv");
  const auto pos = csv.find(",1\n");
  ASSERT_NE(pos, std::string::npos);
  csv[pos + 1] = '0';
  testing_support::WriteFile(dir / "t.csv", csv);
  EXPECT_THROW(ReadTrials(ds, dir / "t.csv", dir / "t.json"), Error);
}

TEST(Eer, Examples) {
  EXPECT_DOUBLE_EQ(ComputeEer(std::vector<double>{0.9, 0.8}, std::vector<double>{0.2, 0.1}).eer,
                   0.0);
  const std::vector<double> v = {0.1, 0.5, 0.9, 0.3};
  EXPECT_DOUBLE_EQ(ComputeEer(v, v).eer, 0.5);
}

TEST(Eer, HandDerivedSweep) {
  // Sweep (FAR, FRR) at t = .1 .2 .3 .4: (1,0) (2/3,0) (1/3,0) (1/3,1/3).
  const std::vector<double> same = {0.9, 0.4, 0.3}, diff = {0.8, 0.2, 0.1};
  const auto r = ComputeEer(same, diff);
  EXPECT_DOUBLE_EQ(r.eer, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.threshold, 0.4);
  EXPECT_EQ(r.n_same, 3u);
  EXPECT_EQ(r.n_diff, 3u);
  const auto sweep = oracle::ThresholdSweep(same, diff);
  EXPECT_DOUBLE_EQ(sweep[3].far, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(sweep[3].frr, 1.0 / 3.0);
}

TEST(Eer, DegenerateTrials) {
  EXPECT_THROW(ComputeEer(std::vector<double>{}, std::vector<double>{0.1}), Error);
  EXPECT_THROW(ComputeEer(std::vector<double>{0.1}, std::vector<double>{}), Error);
}

TEST(EerProperty, MatchesBruteForceSweep) {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const auto ns = 1 + rng.Below(60), nd = 1 + rng.Below(60);
    const bool coarse = i % 2 == 0;  // many ties
    auto draw = [&](double shift) {
      const double v = rng.Normal(shift, 1.0);
      return coarse ? std::round(v * 4.0) / 4.0 : v;
    };
    std::vector<double> same, diff;
    for (std::uint64_t k = 0; k < ns; ++k) same.push_back(draw(1.0));
    for (std::uint64_t k = 0; k < nd; ++k) diff.push_back(draw(0.0));
    const auto expected = oracle::BruteForceEer(same, diff);
    const auto got = ComputeEer(same, diff);
    EXPECT_NEAR(got.eer, expected.eer, 1e-12);
    EXPECT_NEAR(got.threshold, expected.threshold, 1e-12);
    EXPECT_GE(got.eer, 0.0);
    EXPECT_LE(got.eer, 1.0);
  }
}

TEST(EerProperty, InvariantUnderIncreasingTransform) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> same(30), diff(40), ts, td;
    for (auto &v : same) v = std::round(rng.Normal(0.8, 1.0) * 8) / 8;
    for (auto &v : diff) v = std::round(rng.Normal(0.0, 1.0) * 8) / 8;
    for (double v : same) ts.push_back(std::exp(v) * 3.0 + 1.0);
    for (double v : diff) td.push_back(std::exp(v) * 3.0 + 1.0);
    EXPECT_NEAR(ComputeEer(same, diff).eer, ComputeEer(ts, td).eer, 1e-12);
  }
}

TEST(Eer, FromTrialsUsesCosine) {
  const auto ds = MakeDataset({{"A", Gender::kFemale, "a", {{1, 0}, {1, 0.1f}}},
                               {"B", Gender::kFemale, "a", {{0, 1}, {0.1f, 1}}}});
  const auto t = SampleTrials(ds, 2, 1, 3);
  EXPECT_DOUBLE_EQ(EerFromTrials(ds, t).eer, 0.0);
}

TEST(ScoreTrials, ThreadCountDoesNotChangeScores) {
  const auto ds = MakeDataset(RandomSpeakers(8, 12, 16, 6));
  const auto t = SampleTrials(ds, 40, 10, 1);
  EXPECT_EQ(ScoreTrials(ds, t.trials, 1), ScoreTrials(ds, t.trials, 8));
}

TEST(Intra, Examples) {
  const auto ds = MakeDataset({{"same", Gender::kFemale, "a", {{1, 2}, {1, 2}, {1, 2}}},
                               {"orth", Gender::kFemale, "a", {{1, 0}, {0, 1}}},
                               {"tri", Gender::kFemale, "a", {{1, 0}, {0, 1}, {1, 1}}}});
  const auto m = IntraSpeakerMeans(ds);
  EXPECT_NEAR(m.at("same"), 1.0, 1e-15);
  EXPECT_NEAR(m.at("orth"), 0.0, 1e-15);
  EXPECT_NEAR(m.at("tri"), 0.4714045207910316, 1e-15);
}

TEST(Inter, OrthogonalSpeakersAndDiagonal) {
  const auto ds = MakeDataset({{"A", Gender::kFemale, "a", {{1, 0}, {2, 0}}},
                               {"B", Gender::kMale, "a", {{0, 1}, {0, 3}}}});
  const auto t = SampleTrials(ds, 3, 1, 2);
  const auto scores = ScoreTrials(ds, t.trials);
  const auto intra = IntraSpeakerMeans(ds);
  const auto m = InterSpeakerMatrix(ds, t, scores, intra);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(*m.at(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(*m.at(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(*m.at(0, 0), intra.at("A"));
}

TEST(InterProperty, SymmetricAndBounded) {
  const auto ds = MakeDataset(RandomSpeakers(10, 8, 6, 8));
  const auto t = SampleTrials(ds, 30, 6, 4);
  const auto scores = ScoreTrials(ds, t.trials);
  const auto m = InterSpeakerMatrix(ds, t, scores, IntraSpeakerMeans(ds));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) {
      EXPECT_EQ(m.at(i, j), m.at(j, i));
      if (m.at(i, j)) {
        EXPECT_GE(*m.at(i, j), -1.0);
        EXPECT_LE(*m.at(i, j), 1.0);
      }
    }
}

TEST(ClosestPairs, OrderedAndFormatted) {
  SimilarityMatrix m;
  m.speakers = {"htm", "mar", "zed"};
  m.values = {0.9, 0.42, 0.1, 0.42, 0.8, std::nullopt, 0.1, std::nullopt, 0.7};
  const auto pairs = ClosestPairs(m, 5);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(FormatSpeakerPair(pairs[0]), "htm/mar 0.42");
  EXPECT_EQ(pairs[1].second, "zed");
  EXPECT_EQ(ClosestPairs(m, 1).size(), 1u);
}

TEST(Groups, StandardOrder) {
  const auto ds = MakeDataset(RandomSpeakers(6, 3, 3, 1));
  std::vector<std::string> names;
  for (const auto &g : StandardGroups(ds)) names.push_back(g.name);
  EXPECT_EQ(names, (std::vector<std::string>{"all", "female", "male", "home", "studio"}));
}

TEST(Groups, AllEqualsUngroupedAndSingleSpeakerEqualsSpeaker) {
  const auto ds = MakeDataset(RandomSpeakers(6, 10, 5, 12));
  const auto t = SampleTrials(ds, 25, 5, 3);
  const auto scores = ScoreTrials(ds, t.trials);
  const auto groups = StandardGroups(ds);
  EXPECT_DOUBLE_EQ(GroupEer(ds, t, scores, groups[0]).eer, EerFromTrials(ds, t).eer);
  const auto intra = IntraSpeakerMeans(ds);
  // spk100 is the only speaker in subset "studio" among the first three.
  const auto ds1 = MakeDataset({RandomSpeakers(2, 4, 3, 9)[0], RandomSpeakers(2, 4, 3, 9)[1]});
  const auto intra1 = IntraSpeakerMeans(ds1);
  const Group studio{"studio", Grouping::kSubset, "studio"};
  EXPECT_DOUBLE_EQ(GroupSpeakerMean(ds1, intra1, studio), intra1.at("spk100"));
  double mean = 0;
  for (const auto &[k, v] : intra) mean += v;
  EXPECT_DOUBLE_EQ(GroupSpeakerMean(ds, intra, groups[0]), mean / intra.size());
}

TEST(Groups, EmptyGroupBecomesMissingValue) {
  const auto ds = MakeDataset({{"A", Gender::kFemale, "a", {{1, 0}, {1, 1}}},
                               {"B", Gender::kFemale, "a", {{0, 1}, {1, 2}}}});
  const auto t = SampleTrials(ds, 2, 1, 3);
  const auto scores = ScoreTrials(ds, t.trials);
  const auto eer = AggregateEer(ds, t, scores, StandardGroups(ds));
  ASSERT_EQ(eer.size(), 4u);
  EXPECT_TRUE(eer[0].value);
  EXPECT_EQ(eer[2].group, "male");
  EXPECT_FALSE(eer[2].value);
}

}  // namespace
}  // namespace embprobe
