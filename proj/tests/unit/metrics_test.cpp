#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "speechlabel/error.hpp"
#include "speechlabel/metrics.hpp"

using namespace speechlabel;

namespace {
std::vector<Event> log(const std::string& text) { return parse_event_log(text); }
}  // namespace

TEST(Semantic, MicroAveraged) {
  PrfCounts c = prf_counts({"dog", "cat"}, {"dog", "person"});
  EXPECT_EQ(c.true_positives, 1u);
  c += prf_counts({"car"}, {"car"});
  const auto p = semantic_prf(c);
  EXPECT_DOUBLE_EQ(p.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.recall, 2.0 / 3.0);
  EXPECT_NEAR(f1_score(0.873, 0.839), 0.8557, 1e-4);
  EXPECT_DOUBLE_EQ(f1_score(0, 0), 0.0);
}

TEST(Semantic, EmptyConventions) {
  EXPECT_DOUBLE_EQ(semantic_prf({}, {}).precision, 1.0);
  EXPECT_DOUBLE_EQ(semantic_prf({}, {"dog"}).precision, 0.0);
  EXPECT_DOUBLE_EQ(semantic_prf({"dog"}, {}).recall, 0.0);
  EXPECT_DOUBLE_EQ(semantic_prf({}, {}).recall, 1.0);
}

TEST(Spearman, MatchesDefinitionWithTies) {
  std::mt19937 gen(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 30;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(gen() % 6);
    for (auto& v : y) v = static_cast<double>(gen() % 4) * 0.5;
    const auto got = spearman_rank_correlation(x, y);
    const auto want = oracle::spearman(x, y);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) EXPECT_NEAR(*got, *want, 1e-12);
  }
  const std::vector<double> a{1, 2, 3}, b{3, 2, 1}, c{5, 5, 5};
  EXPECT_DOUBLE_EQ(*spearman_rank_correlation(a, b), -1.0);
  EXPECT_FALSE(spearman_rank_correlation(a, c).has_value());
  EXPECT_THROW(spearman_rank_correlation(a, std::vector<double>{1, 2}), ValidationError);
  EXPECT_EQ(average_ranks(std::vector<double>{10, 20, 10}), (std::vector<double>{1.5, 3, 1.5}));
}

TEST(Histogram, ContiguousBins) {
  const std::vector<double> d{0.1, 0.3, 0.3, 1.1};
  const auto h = utterance_duration_histogram(d);
  ASSERT_EQ(h.size(), 5u);
  EXPECT_EQ(h[0].count, 1u);
  EXPECT_EQ(h[1].count, 2u);
  EXPECT_EQ(h[2].count, 0u);
  EXPECT_DOUBLE_EQ(h[4].lo, 1.0);
  EXPECT_TRUE(histogram(std::vector<double>{}, 1.0).empty());
  EXPECT_DOUBLE_EQ(*median({3, 1, 2, 10}), 2.5);
  EXPECT_FALSE(median({}).has_value());
}

TEST(Mouse, PathLengthMatchesSummation) {
  std::mt19937 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Event> ev{{EventKind::image_shown, 0, std::nullopt}};
    std::vector<Point> pts;
    Point p{100, 100};
    double t = 0;
    for (int k = 0; k < 200; ++k) {
      p.x = std::clamp(p.x + static_cast<int>(gen() % 21) - 10.0, 0.0, 640.0);
      p.y = std::clamp(p.y + static_cast<int>(gen() % 21) - 10.0, 0.0, 480.0);
      t += 0.04;
      ev.push_back({gen() % 10 == 0 ? EventKind::click : EventKind::mouse_move, t, p});
      pts.push_back(p);
      if (gen() % 15 == 0) ev.push_back({EventKind::key, t, std::nullopt});
    }
    ev.push_back({EventKind::submit, t + 1, std::nullopt});
    EXPECT_NEAR(mouse_path_length(ev), oracle::path_length(pts), 1e-9 * (1 + oracle::path_length(pts)));
  }
}

TEST(Mouse, MovingIntervalsUseGap) {
  const auto ev = log(
      "{\"kind\":\"image_shown\",\"t\":0}\n"
      "{\"kind\":\"mouse_move\",\"t\":1.0,\"x\":1,\"y\":1}\n{\"kind\":\"mouse_move\",\"t\":1.04,\"x\":2,\"y\":1}\n"
      "{\"kind\":\"mouse_move\",\"t\":1.08,\"x\":3,\"y\":1}\n{\"kind\":\"mouse_move\",\"t\":2.0,\"x\":4,\"y\":1}\n"
      "{\"kind\":\"submit\",\"t\":3}\n");
  const auto m = mouse_moving_intervals(ev, 0.1);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(total_length(m), 0.08, 1e-12);
}

TEST(Consult, IntervalsAndValidation) {
  const auto ev = log(
      "{\"kind\":\"image_shown\",\"t\":0}\n{\"kind\":\"show_classes_open\",\"t\":1}\n{\"kind\":\"show_classes_close\",\"t\":8.8}\n"
      "{\"kind\":\"submit\",\"t\":10}\n");
  const auto c = consult_intervals(ev);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].length(), 7.8, 1e-12);
  EXPECT_THROW(consult_intervals(log("{\"kind\":\"image_shown\",\"t\":0}\n{\"kind\":\"show_classes_open\",\"t\":1}\n"
                                     "{\"kind\":\"submit\",\"t\":10}\n")),
               ValidationError);
}

TEST(Timing, PerClickAndFinalReview) {
  const auto ev = log(
      "{\"kind\":\"image_shown\",\"t\":0}\n{\"kind\":\"click\",\"t\":3.3,\"x\":1,\"y\":1}\n"
      "{\"kind\":\"click\",\"t\":5.3,\"x\":1,\"y\":1}\n{\"kind\":\"submit\",\"t\":10}\n");
  const auto s = session_timing(ev, 2, 6.1);
  EXPECT_DOUBLE_EQ(s.time_per_image, 10.0);
  EXPECT_DOUBLE_EQ(*s.time_per_label, 5.0);
  ASSERT_EQ(s.per_click.size(), 2u);
  EXPECT_NEAR(s.per_click[0], 3.3, 1e-12);
  EXPECT_NEAR(s.per_click[1], 2.0, 1e-12);
  EXPECT_NEAR(*s.final_review, 3.9, 1e-12);
  EXPECT_NEAR(*session_timing(ev, 2, std::nullopt).final_review, 4.7, 1e-12);
  const std::vector<SessionTiming> all{s, session_timing(ev, 0, std::nullopt)};
  const auto r = timing_report(all);
  EXPECT_DOUBLE_EQ(*r.time_per_label.value, 10.0);
  ASSERT_EQ(r.per_click_index_means.size(), 2u);
  EXPECT_EQ(r.per_click_index_means[0].count, 2u);
}

TEST(TimeAllocation, Fractions) {
  const auto ev = log(
      "{\"kind\":\"image_shown\",\"t\":0}\n{\"kind\":\"show_classes_open\",\"t\":0.5}\n{\"kind\":\"show_classes_close\",\"t\":1.5}\n"
      "{\"kind\":\"mouse_move\",\"t\":2.0,\"x\":1,\"y\":1}\n{\"kind\":\"mouse_move\",\"t\":2.1,\"x\":2,\"y\":1}\n"
      "{\"kind\":\"mouse_move\",\"t\":2.2,\"x\":3,\"y\":1}\n{\"kind\":\"submit\",\"t\":4}\n");
  const std::vector<Interval> speech{{2.1, 3.0}, {2.5, 3.0}};
  const auto a = session_allocation(ev, speech, 0.1);
  EXPECT_NEAR(a.speaking, 0.9, 1e-12);
  EXPECT_NEAR(a.mouse_moving, 0.2, 1e-12);
  EXPECT_NEAR(a.moving_during_speech, 0.1, 1e-12);
  EXPECT_NEAR(a.consult, 1.0, 1e-12);
  const std::vector<SessionAllocation> both{a, SessionAllocation{4.0, 0, 0, 0, 0, 0}};
  const auto t = time_allocation(both);
  EXPECT_NEAR(*t.speaking_frac.value, 0.9 / 8.0, 1e-12);
  EXPECT_NEAR(*t.mouse_moving_during_speech_frac.value, 0.1 / 0.9, 1e-12);
  EXPECT_DOUBLE_EQ(*t.consult_rate.value, 0.5);
  EXPECT_NEAR(*t.mean_consult_s, 1.0, 1e-12);
}

TEST(RecallAtK, CountsTopK) {
  TrainingImageRecord r;
  r.typed = {{"dog", {}, 0}, {"cat", {}, 0}, {"cup", {}, 0}, {"tv", {}, 0}};
  auto res = [](std::vector<std::string> texts) {
    TranscriptionResult t;
    for (std::size_t i = 0; i < texts.size(); ++i) t.alternatives.push_back({texts[i], static_cast<int>(i) + 1, {}});
    return t;
  };
  r.spoken = {res({"Dog", "dogs"}), res({"hat", "bat", "cat"}), res({}), res({"t v"})};
  const std::vector<TrainingImageRecord> recs{r};
  const auto r1 = transcription_recall_at_k(recs, 1);
  const auto r3 = transcription_recall_at_k(recs, 3);
  EXPECT_EQ(r1.denominator, 3.0);
  EXPECT_EQ(r1.numerator, 1.0);
  EXPECT_EQ(r3.numerator, 2.0);
  EXPECT_FALSE(transcription_recall_at_k(std::vector<TrainingImageRecord>{}, 1).value.has_value());
}
