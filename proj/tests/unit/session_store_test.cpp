#include <gtest/gtest.h>

#include <thread>

#include "speechlabel/error.hpp"
#include "speechlabel/session_store.hpp"
#include "temp_dir.hpp"

using namespace speechlabel;

namespace {
ImageSession sample(const std::string& name) {
  ImageSession s;
  s.name = name;
  s.meta = {"42", {320, 240}, "coco80", "ann", SessionMode::training};
  s.events = parse_event_log(
      "{\"kind\":\"image_shown\",\"t\":0}\n{\"kind\":\"click\",\"t\":1.5,\"x\":10,\"y\":20}\n{\"kind\":\"submit\",\"t\":3}\n");
  s.typed = {{"dog", {10, 20}, 1.5}};
  return s;
}
AudioRef audio() {
  AudioRef a;
  a.sample_rate = 8000;
  a.samples.assign(24000, 7);
  return a;
}
}  // namespace

TEST(SessionStore, SaveLoadRoundTrip) {
  TempDir dir;
  SessionStore store(dir.path());
  store.save(sample("s1"), audio());
  EXPECT_EQ(store.list(), std::vector<std::string>{"s1"});
  const auto s = store.load("s1");
  EXPECT_EQ(s.meta.image_id, "42");
  EXPECT_EQ(s.meta.mode, SessionMode::training);
  EXPECT_EQ(s.meta.key(), "ann:42");
  EXPECT_EQ(s.events.size(), 3u);
  ASSERT_EQ(s.typed.size(), 1u);
  EXPECT_EQ(s.typed[0].text, "dog");
  EXPECT_EQ(store.load_audio("s1"), audio());
}

TEST(SessionStore, ListSkipsIncompleteFolders) {
  TempDir dir;
  SessionStore store(dir.path());
  store.save(sample("b"), audio());
  store.save(sample("a"), audio());
  std::filesystem::create_directories(dir / "junk");
  EXPECT_EQ(store.list(), (std::vector<std::string>{"a", "b"}));
  EXPECT_FALSE(store.exists("junk"));
}

TEST(SessionStore, MetaValidation) {
  EXPECT_THROW(parse_meta(nlohmann::json::parse(R"({"image_id":"1"})")), Error);
  EXPECT_THROW(parse_session_mode("exam"), ValidationError);
  const auto m = parse_meta(nlohmann::json::parse(
      R"({"image_id":7,"image_width":10,"image_height":5,"vocabulary_id":"v","annotator_id":"a","mode":"main"})"));
  EXPECT_EQ(m.image_id, "7");
  EXPECT_EQ(to_json(m)["image_width"], 10);
}

TEST(SessionStore, ConcurrentSavesOfDistinctSessions) {
  TempDir dir;
  SessionStore store(dir.path());
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] { store.save(sample("s" + std::to_string(i)), audio()); });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(store.list().size(), 8u);
  for (const auto& n : store.list()) EXPECT_NO_THROW(store.load(n));
}

TEST(SessionStore, LoadReportsBrokenEvents) {
  TempDir dir;
  SessionStore store(dir.path());
  store.save(sample("s"), audio());
  store.write_file("s", SessionStore::kEvents, "{\"kind\":\"image_shown\",\"t\":0}\n{oops\n");
  EXPECT_THROW(store.load("s"), ParseError);
}
