#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <sstream>

#include "parmine/alignment.hpp"
#include "parmine/error.hpp"

namespace parmine {
namespace {

using ScoreTable = std::function<double(Span, Span)>;

struct Best {
  double objective = -1e300;
  std::vector<Bead> beads;
  bool found = false;
};

// Reverse-lexicographic order on bead types, last bead first.
bool reverse_lex_less(const std::vector<Bead>& a, const std::vector<Bead>& b) {
  auto ia = a.rbegin();
  auto ib = b.rbegin();
  for (; ia != a.rend() && ib != b.rend(); ++ia, ++ib) {
    if (ia->type() != ib->type()) return ia->type() < ib->type();
  }
  return a.size() < b.size();
}

// Every monotone bead sequence covering the lattice; objective summed left
// to right like alignment_objective.
void enumerate(std::size_t i, std::size_t j, std::size_t n, std::size_t m, const ScoreTable& score,
               double gap, std::vector<Bead>& path, double total, Best& best) {
  if (i == n && j == m) {
    if (!best.found || total > best.objective ||
        (total == best.objective && reverse_lex_less(path, best.beads))) {
      best = {total, path, true};
    }
    return;
  }
  for (BeadType t : kBeadTypes) {
    const std::size_t di = src_width(t), dj = tgt_width(t);
    if (i + di > n || j + dj > m) continue;
    const Span s{i, di}, u{j, dj};
    const double bs = is_gap(t) ? 0.0 : score(s, u);
    path.push_back({s, u, bs});
    enumerate(i + di, j + dj, n, m, score, gap, path, total + (is_gap(t) ? -gap : bs), best);
    path.pop_back();
  }
}

Best brute_force(std::size_t n, std::size_t m, const ScoreTable& score, double gap) {
  Best best;
  std::vector<Bead> path;
  enumerate(0, 0, n, m, score, gap, path, 0.0, best);
  return best;
}

// Deterministic pseudo-random score per (span, span) pair.
ScoreTable random_scores(std::uint64_t seed, int levels) {
  return [seed, levels](Span s, Span t) {
    std::uint64_t h = seed;
    for (std::size_t v : {s.begin, s.count, t.begin, t.count}) h = (h ^ v) * 0x100000001b3ULL + 0x9E37;
    h ^= h >> 29;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 32;
    if (levels > 0) return static_cast<double>(h % levels) / (levels - 1);
    return static_cast<double>(h % 2000001) / 1000000.0 - 1.0;
  };
}

TEST(AlignSpans, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 6, m = 1 + rng() % 6;
    const bool dyadic = trial % 2;
    const double gap = dyadic ? static_cast<double>(rng() % 4) / 8.0 : static_cast<double>(rng() % 50) / 100.0;
    const auto score = random_scores(rng(), dyadic ? 3 : 0);
    const auto dp = align_spans(n, m, score, gap);
    const auto oracle = brute_force(n, m, score, gap);
    EXPECT_EQ(alignment_objective(dp, gap), oracle.objective);
    // With exact sums every tie is a true tie, so the tie-break order is
    // observable; otherwise rounding decides and only the objective is compared.
    if (dyadic) {
      EXPECT_EQ(dp, oracle.beads) << n << "x" << m << " trial " << trial;
    }
  }
}

TEST(AlignSpans, EmptySide) {
  const auto beads = align_spans(2, 0, random_scores(1, 0), 0.1);
  ASSERT_EQ(beads.size(), 2u);
  EXPECT_EQ(beads[0].type(), BeadType::OneZero);
  EXPECT_TRUE(align_spans(0, 0, random_scores(1, 0), 0.1).empty());
}

TEST(AlignSpans, TieBreakOnConstructedTies) {
  // All paths tie, so each cell keeps the first bead type in order.
  const ScoreTable zero = [](Span, Span) { return 0.0; };
  const auto square = align_spans(3, 3, zero, 0.0);
  ASSERT_EQ(square.size(), 3u);
  for (const auto& b : square) EXPECT_EQ(b.type(), BeadType::OneOne);
  const auto wide = align_spans(2, 1, zero, 0.0);
  ASSERT_EQ(wide.size(), 2u);
  EXPECT_EQ(wide[0].type(), BeadType::OneZero);
  EXPECT_EQ(wide[1].type(), BeadType::OneOne);

  // [1-2, 2-1] and [2-1, 1-2] both total 0; the final cell prefers 2-1.
  const ScoreTable crossed = [](Span a, Span b) { return a.count == 1 && b.count == 1 ? -1.0 : 0.0; };
  const auto beads = align_spans(3, 3, crossed, 10.0);
  ASSERT_EQ(beads.size(), 2u);
  EXPECT_EQ(beads[0].type(), BeadType::OneTwo);
  EXPECT_EQ(beads[1].type(), BeadType::TwoOne);
}

TEST(AlignSpans, QuantizedScoresMatchOracleTieBreak) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 5, m = 1 + rng() % 5;
    const auto score = random_scores(rng(), 2);
    const double gap = trial % 2 ? 0.0 : 0.5;
    EXPECT_EQ(align_spans(n, m, score, gap), brute_force(n, m, score, gap).beads);
  }
}

class MockAlign : public ::testing::Test {
 protected:
  MockProvider mock_;
};

TEST_F(MockAlign, IdenticalListsGiveDiagonal) {
  const std::vector<std::string> s = {"sarvadharmāḥ anātmānaḥ", "rūpaṃ śūnyatā", "evam eva vedanā"};
  const auto beads = align_region(s, s, mock_, 64, {});
  ASSERT_EQ(beads.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(beads[i].type(), BeadType::OneOne);
    EXPECT_EQ(beads[i].src, (Span{i, 1}));
    EXPECT_EQ(beads[i].tgt, (Span{i, 1}));
    EXPECT_NEAR(beads[i].score, 1.0, 1e-6);
  }
}

TEST_F(MockAlign, MergedTargetGivesTwoOne) {
  const std::string a = "the first line stands alone", b = "second half of a verse",
                    c = "closing words of the verse";
  const auto beads = align_region({a, b, c}, {a, b + " " + c}, mock_, 64, {});
  ASSERT_EQ(beads.size(), 2u);
  EXPECT_EQ(beads[0].type(), BeadType::OneOne);
  EXPECT_EQ(beads[1].type(), BeadType::TwoOne);
  EXPECT_EQ(beads[1].src, (Span{1, 2}));
  EXPECT_NEAR(beads[1].score, 1.0, 1e-6);
}

TEST_F(MockAlign, RegionCap) {
  const std::vector<std::string> big(5, "x");
  AlignParams p;
  p.max_region = 4;
  try {
    align_region(big, {"x"}, mock_, 64, p);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("raise alignment.max_region"), std::string::npos);
  }
  EXPECT_THROW(align_region({}, {"x"}, mock_, 64, {}), DataError);
}

TEST_F(MockAlign, BeadsAreMonotonePartitions) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> words = {"dharma", "buddha", "sangha", "karma", "nirvana", "bodhi"};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> s(1 + rng() % 7), t(1 + rng() % 7);
    for (auto* side : {&s, &t}) {
      for (auto& x : *side) x = words[rng() % words.size()] + " " + words[rng() % words.size()];
    }
    const auto beads = align_region(s, t, mock_, 64, {});
    std::size_t si = 0, ti = 0;
    for (const auto& b : beads) {
      EXPECT_EQ(b.src.begin, si);
      EXPECT_EQ(b.tgt.begin, ti);
      si = b.src.end();
      ti = b.tgt.end();
      EXPECT_NO_THROW(b.type());
      EXPECT_GE(b.score, -1.0);
      EXPECT_LE(b.score, 1.0);
    }
    EXPECT_EQ(si, s.size());
    EXPECT_EQ(ti, t.size());
  }
}

std::vector<Bead> beads_with_scores(const std::vector<double>& scores) {
  std::vector<Bead> beads;
  for (std::size_t i = 0; i < scores.size(); ++i) beads.push_back({{i, 1}, {i, 1}, scores[i]});
  return beads;
}

std::vector<std::vector<double>> run_scores(const std::vector<std::vector<Bead>>& runs) {
  std::vector<std::vector<double>> out;
  for (const auto& r : runs) {
    out.emplace_back();
    for (const auto& b : r) out.back().push_back(b.score);
  }
  return out;
}

TEST(Filter, WorkedExamples) {
  EXPECT_EQ(run_scores(filter_alignment(beads_with_scores({0.2, 0.9, 0.9, 0.2}), 1, 0.5)),
            (std::vector<std::vector<double>>{{0.9, 0.9}}));
  const auto good = beads_with_scores({0.6, 0.7, 0.9, 0.55});
  const auto same = filter_alignment(good, 3, 0.5);
  ASSERT_EQ(same.size(), 1u);
  EXPECT_EQ(same[0], good);
  EXPECT_EQ(run_scores(filter_alignment(beads_with_scores({0.9, 0.9, 0.1, 0.9, 0.9}), 1, 0.5)),
            (std::vector<std::vector<double>>{{0.9, 0.9}, {0.9, 0.9}}));
}

TEST(Filter, MovingAverageTruncatesAtEnds) {
  const auto ma = moving_average(beads_with_scores({0.3, 0.6, 0.9, 0.0}), 3);
  EXPECT_DOUBLE_EQ(ma[0], 0.45);
  EXPECT_DOUBLE_EQ(ma[1], 0.6);
  EXPECT_DOUBLE_EQ(ma[2], 0.5);
  EXPECT_DOUBLE_EQ(ma[3], 0.45);
}

TEST(Filter, GapBeadsCountAsZero) {
  std::vector<Bead> beads = beads_with_scores({0.9, 0.9, 0.9});
  beads.insert(beads.begin() + 1, Bead{{1, 1}, {1, 0}, 0.7});
  const auto ma = moving_average(beads, 3);
  EXPECT_DOUBLE_EQ(ma[0], 0.45);
}

TEST(Filter, RejectsEvenWindow) {
  EXPECT_THROW(filter_alignment(beads_with_scores({0.5}), 2, 0.5), ConfigError);
  EXPECT_THROW(filter_alignment(beads_with_scores({0.5}), 0, 0.5), ConfigError);
  EXPECT_TRUE(filter_alignment({}, 3, 0.5).empty());
}

TEST(Filter, IdempotentOnRandomInputs) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.2, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> scores(rng() % 25);
    for (auto& s : scores) s = u(rng);
    const std::size_t window = 1 + 2 * (rng() % 4);
    const double threshold = static_cast<double>(rng() % 10) / 10.0;
    const auto once = filter_alignment(beads_with_scores(scores), window, threshold);
    std::vector<std::vector<Bead>> twice;
    for (const auto& run : once) {
      for (auto& r : filter_alignment(run, window, threshold)) twice.push_back(std::move(r));
    }
    EXPECT_EQ(twice, once);
    for (const auto& run : once) {
      EXPECT_FALSE(run.empty());
      for (double m : moving_average(run, window)) EXPECT_GE(m, threshold);
    }
  }
}

TEST(Ratio, Examples) {
  EXPECT_TRUE(ratio_filter(100, 100, {0.33, 3.0}).keep);
  EXPECT_FALSE(ratio_filter(400, 10, {0.33, 3.0}).keep);
  const auto zero = ratio_filter(4, 0, {0.33, 3.0});
  EXPECT_FALSE(zero.keep);
  EXPECT_EQ(zero.reason, "zero-length target");
  RatioPolicy policy;
  AlignedPair p;
  p.src_lang = "zh";
  p.tgt_lang = "sa";
  p.src_text = std::string(20, 'x');
  p.tgt_text = std::string(80, 'y');
  EXPECT_TRUE(ratio_filter(p, policy).keep);
  EXPECT_EQ(policy.bounds("zh", "sa").lo, 0.1);
  EXPECT_EQ(policy.bounds("sa", "zh").hi, 10.0);
  EXPECT_EQ(policy.bounds("sa", "bo").lo, 0.33);
  policy.set("sa", "bo", {0.5, 2.0});
  EXPECT_EQ(policy.bounds("sa", "bo").lo, 0.5);
  EXPECT_THROW(policy.set("sa", "bo", {0.0, 2.0}), ConfigError);
  EXPECT_THROW(policy.set("sa", "bo", {3.0, 2.0}), ConfigError);
}

TEST(Ratio, CountsScalars) {
  AlignedPair p;
  p.src_lang = "sa";
  p.tgt_lang = "bo";
  p.src_text = "धर्म";      // 4 scalars, 12 bytes
  p.tgt_text = "abcdefghijklm";  // 13 scalars, ratio 0.31
  EXPECT_FALSE(ratio_filter(p, RatioPolicy{}).keep);
}

TEST(Dataset, SpansAndRoundTrip) {
  EXPECT_EQ(format_span({3, 2}), "3-4");
  EXPECT_EQ(format_span({3, 0}), "3-");
  EXPECT_EQ(parse_span("3-4"), (Span{3, 2}));
  EXPECT_EQ(parse_span("7-"), (Span{7, 0}));
  EXPECT_THROW(parse_span("4-3"), DataError);
  EXPECT_THROW(parse_span("x"), DataError);
  AlignedPair p{"s#1", "sa", {2, 2}, "a\tb", "t", "bo", {5, 1}, "c\nd \"q\"", 0.8125, 4};
  EXPECT_EQ(p.pair_id(), "s#1#2-3|t#5-5");
  std::stringstream ss;
  write_dataset_jsonl(ss, {p, p});
  const auto back = read_dataset_jsonl(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].src_text, p.src_text);
  EXPECT_EQ(back[0].tgt_text, p.tgt_text);
  EXPECT_EQ(back[0].src_span, p.src_span);
  EXPECT_EQ(back[0].score, p.score);
  EXPECT_EQ(back[0].cluster, 4u);
  std::ostringstream tsv;
  write_dataset_tsv(tsv, {p});
  EXPECT_EQ(tsv.str(),
            "src_doc\tsrc_span\ttgt_doc\ttgt_span\tscore\tsrc_text\ttgt_text\n"
            "s#1\t2-3\tt\t5-5\t0.812500\ta\\tb\tc\\nd \"q\"\n");
  std::stringstream bad("{\"src_doc\":1}\n");
  EXPECT_THROW(read_dataset_jsonl(bad), DataError);
}

}  // namespace
}  // namespace parmine
