#include <gtest/gtest.h>

#include <json.hpp>

#include "speechlabel/session_store.hpp"
#include "temp_dir.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {
std::string cli() { return cli_path().string(); }
std::string coco() { return (fixture_dir() / "coco300").string(); }
}  // namespace

TEST(Cli, EvaluatePrintsReport) {
  std::string out, err;
  ASSERT_EQ(run_command(cli() + " evaluate --store " + coco() + " --gt " + coco() + "/gt.json", &out, &err), 0) << err;
  const auto j = json::parse(out);
  EXPECT_EQ(j["semantic"]["true_positives"], 880);
  EXPECT_EQ(j["images"], 300);
}

TEST(Cli, ProcessIsIdempotentAndHintsCanBeDisabled) {
  TempDir a, b, c;
  ASSERT_EQ(run_command(cli() + " process --store " + coco() + " --out " + a.path().string()), 0);
  ASSERT_EQ(run_command(cli() + " process --store " + coco() + " --out " + b.path().string()), 0);
  ASSERT_EQ(run_command(cli() + " process --store " + coco() + " --out " + b.path().string()), 0);
  for (const auto& e : fs::directory_iterator(a / "labels")) {
    EXPECT_EQ(speechlabel::read_file(e.path()), speechlabel::read_file(b / "labels" / e.path().filename().string()));
  }
  EXPECT_EQ(speechlabel::read_file(a / "report.json"), speechlabel::read_file(b / "report.json"));
  const std::string train = (fixture_dir() / "train240").string();
  std::string out;
  ASSERT_EQ(run_command(cli() + " evaluate --store " + train + " --asr mock --no-phrase-hints", &out), 0);
  // Training transcriptions are always recorded for both conditions; main labelling follows the flag.
  EXPECT_EQ(json::parse(out)["transcription"]["with_hints"]["recall_at_1"]["numerator"], 705.0);
}

TEST(Cli, ValidateListsBadFiles) {
  TempDir dir;
  fs::copy(fixture_dir() / "coco300" / "a01_100000", dir / "a01_100000", fs::copy_options::recursive);
  fs::copy(fixture_dir() / "coco300" / "a01_100001", dir / "a01_100001", fs::copy_options::recursive);
  std::string out, err;
  EXPECT_EQ(run_command(cli() + " validate --store " + dir.path().string(), &out, &err), 0) << err;
  speechlabel::write_file_atomic(dir / "a01_100001" / "events.jsonl", "{\"kind\":\"image_shown\",\"t\":0}\n{broken\n");
  EXPECT_NE(run_command(cli() + " validate --store " + dir.path().string(), &out, &err), 0);
  EXPECT_NE(err.find("a01_100001/events.jsonl"), std::string::npos) << err;
  EXPECT_EQ(err.find("a01_100000"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  std::string err;
  EXPECT_EQ(run_command(cli() + " process --store /does/not/exist --out /tmp/x", nullptr, &err), 2);
  EXPECT_EQ(json::parse(err.substr(0, err.find('\n')))["level"], "error");
  EXPECT_EQ(run_command(cli() + " evaluate --store " + coco() + " --frobnicate"), 2);
  EXPECT_EQ(run_command(cli()), 2);
}

TEST(Cli, GradeTraining) {
  std::string out, err;
  ASSERT_EQ(run_command(cli() + " grade-training --store " + (fixture_dir() / "train240").string(), &out, &err), 0) << err;
  const auto j = json::parse(out);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["rounds"][0]["graded"], 80);
  EXPECT_EQ(j[0]["rounds"][0]["summary"]["ground_truth"], 400);
}
