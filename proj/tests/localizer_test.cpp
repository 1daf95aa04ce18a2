#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "vltrack/localizer.hpp"

namespace vltrack {
namespace {

constexpr ImageSize k100{100, 100};

TEST(ParseBox, Examples) {
  EXPECT_EQ(parse_box(R"({"bbox_2d": [10, 20, 40, 60]})", k100), (BBox{10, 20, 30, 40}));
  EXPECT_EQ(parse_box(R"(Sure! {"bbox_2d":[40,60,10,20]} done.)", k100), (BBox{10, 20, 30, 40}));
  EXPECT_FALSE(parse_box("no target visible", k100));
}

TEST(ParseBox, ToleratesFencesAndProse) {
  const std::string fenced = "Here you go:\n```json\n{\n  \"bbox_2d\" : [ 1.5 , 2 , 11.5 , 12 ]\n}\n```";
  EXPECT_EQ(parse_box(fenced, k100), (BBox{1.5, 2, 10, 10}));
  EXPECT_EQ(parse_box(R"([{"bbox_2d": [1, 2, 3, 4], "label": "car"}])", k100), (BBox{1, 2, 2, 2}));
  // first well-formed occurrence wins
  EXPECT_EQ(parse_box(R"("bbox_2d": "none" then {"bbox_2d": [5,5,9,9]})", k100), (BBox{5, 5, 4, 4}));
}

TEST(ParseBox, ClampsIntoFrame) {
  EXPECT_EQ(parse_box(R"({"bbox_2d": [-10, 90, 20, 130]})", k100), (BBox{0, 90, 20, 10}));
  EXPECT_FALSE(parse_box(R"({"bbox_2d": [200, 200, 300, 300]})", k100));
  EXPECT_FALSE(parse_box(R"({"bbox_2d": [10, 10, 10, 30]})", k100));
}

TEST(ParseBox, Malformed) {
  for (const char* s : {"", "{", R"({"bbox_2d": [1, 2, 3]})", R"({"bbox_2d": [1, 2, 3, 4, 5]})",
                        R"({"bbox_2d": [a, b, c, d]})", R"({"bbox_2d": [1e999, 2, 3, 4]})",
                        R"({"bbox": [1, 2, 3, 4]})", R"({"bbox_2d" [1, 2, 3, 4]})"}) {
    EXPECT_FALSE(parse_box(s, k100)) << s;
  }
  EXPECT_FALSE(parse_box(R"({"bbox_2d": [1, 2, 3, 4]})", {0, 0}));
}

TEST(ParseBox, PerMilleOnlyWhenAbsoluteReadingLeavesFrame) {
  const ImageSize big{2000, 1500};
  // absolute reading fits: taken literally
  EXPECT_EQ(parse_box(R"({"bbox_2d": [100, 100, 500, 500]})", big), (BBox{100, 100, 400, 400}));
  // y2 = 1600 would leave a 1500-high frame, but 1600 > 1000 rules out per-mille
  EXPECT_EQ(parse_box(R"({"bbox_2d": [100, 100, 500, 1600]})", big), (BBox{100, 100, 400, 1400}));
  // small frames never rescale
  EXPECT_EQ(parse_box(R"({"bbox_2d": [10, 10, 900, 900]})", {640, 480}),
            (BBox{10, 10, 630, 470}));
  // 1000x900 frame with longest side not above 1000
  EXPECT_EQ(parse_box(R"({"bbox_2d": [0, 0, 1000, 950]})", {1000, 900}), (BBox{0, 0, 1000, 900}));
}

TEST(ParseBox, PerMilleRescale) {
  const ImageSize tall{1200, 800};
  // x2 = 1000 fits (<= 1200) but y2 = 900 > 800: rescale by (1.2, 0.8)
  const auto b = parse_box(R"({"bbox_2d": [500, 250, 1000, 900]})", tall);
  ASSERT_TRUE(b);
  EXPECT_DOUBLE_EQ(b->x, 600);
  EXPECT_DOUBLE_EQ(b->y, 200);
  EXPECT_DOUBLE_EQ(b->w, 600);
  EXPECT_DOUBLE_EQ(b->h, 520);
}

TEST(ParseBox, TotalOnRandomInput) {
  std::mt19937_64 rng(99);
  const std::string alphabet = "{}[]:,\" -.0123456789ebox_2dBBOX\n";
  const std::string seed = R"({"bbox_2d": [12, 34, 56, 78]})";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 80);
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    if (i % 2) {
      s = seed;
      std::uniform_int_distribution<std::size_t> at(0, s.size() - 1);
      for (int k = 0; k < 3; ++k) s[at(rng)] = alphabet[pick(rng)];
    } else {
      const int n = len(rng);
      for (int k = 0; k < n; ++k) s += alphabet[pick(rng)];
    }
    const auto b = parse_box(s, k100);
    if (b) {
      EXPECT_FALSE(b->degenerate());
      EXPECT_GE(b->x, 0);
      EXPECT_GE(b->y, 0);
      EXPECT_LE(b->right(), 100);
      EXPECT_LE(b->bottom(), 100);
    }
  }
}

TEST(FormatBox, RoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 4000);
  for (int i = 0; i < 10000; ++i) {
    const ImageSize size{dim(rng), dim(rng)};
    std::uniform_int_distribution<int> ux(0, size.width - 1), uy(0, size.height - 1);
    const int x = ux(rng), y = uy(rng);
    std::uniform_int_distribution<int> uw(1, size.width - x), uh(1, size.height - y);
    const BBox b{double(x), double(y), double(uw(rng)), double(uh(rng))};
    ASSERT_EQ(parse_box(format_box(b), size), b) << format_box(b);
  }
  EXPECT_EQ(format_box({1, 2, 3, 4}), R"({"bbox_2d": [1, 2, 4, 6]})");
  EXPECT_EQ(format_box({0.5, 0, 1.25, 1}), R"({"bbox_2d": [0.5, 0, 1.75, 1]})");
}

LocalizerRequest request(const std::string& seq, std::size_t frame, ImageSize size = k100) {
  LocalizerRequest r;
  r.template_image = testing::noise_image(4, 4, 1);
  r.frame = testing::noise_image(size.width, size.height, 2);
  r.instruction = "find it";
  r.frame_size = size;
  r.sequence = seq;
  r.frame_index = frame;
  return r;
}

TEST(OracleLocalizer, AnswersTruth) {
  OracleLocalizer oracle({{"s", {{1, 2, 3, 4}, {10, 10, 20, 20}, {}}}});
  auto r = oracle.localize(request("s", 2));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r.box, (BBox{10, 10, 20, 20}));
  EXPECT_EQ(parse_box(r.raw_text, k100), r.box);

  r = oracle.localize(request("s", 3));
  EXPECT_EQ(r.status, LocalizeStatus::parse_failure);
  EXPECT_FALSE(parse_box(r.raw_text, k100));

  EXPECT_EQ(oracle.localize(request("t", 1)).status, LocalizeStatus::transport_error);
  EXPECT_EQ(oracle.localize(request("s", 9)).status, LocalizeStatus::transport_error);
}

TEST(OracleLocalizer, ShiftedAndClamped) {
  OracleLocalizer oracle({{"s", {{0, 0, 5, 5}, {90, 90, 10, 10}}}}, 3, 4);
  EXPECT_EQ(*oracle.localize(request("s", 1)).box, (BBox{3, 4, 5, 5}));
  EXPECT_EQ(*oracle.localize(request("s", 2)).box, (BBox{93, 94, 7, 6}));
}

TEST(ScriptedLocalizer, ReplaysAndParses) {
  TranscriptEntry a;
  a.sequence = "s";
  a.frame_index = 2;
  a.raw_text = R"(ok {"bbox_2d": [1, 1, 5, 5]})";
  TranscriptEntry b = a;
  b.frame_index = 3;
  b.raw_text = "lost it";
  ScriptedLocalizer scripted({a, b});
  auto r = scripted.localize(request("s", 2));
  EXPECT_EQ(r.status, LocalizeStatus::ok);
  EXPECT_EQ(*r.box, (BBox{1, 1, 4, 4}));
  r = scripted.localize(request("s", 3));
  EXPECT_EQ(r.status, LocalizeStatus::parse_failure);
  EXPECT_EQ(r.raw_text, "lost it");
  EXPECT_EQ(scripted.localize(request("s", 4)).status, LocalizeStatus::parse_failure);
}

TEST(Transcript, JsonLineRoundTrip) {
  TranscriptEntry e;
  e.sequence = "seq \"one\"";
  e.frame_index = 7;
  e.status = "parse_failure";
  e.raw_text = "line1\nline2";
  e.box = BBox{1.5, 2, 3, 4};
  e.latency_ms = 12.5;
  e.instruction = "find";
  e.prompt_rect = PixelRect{1, 2, 3, 4};
  e.frame_digest = "abc";
  e.source_digest = "def";
  const std::string line = e.to_json_line();
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const TranscriptEntry r = TranscriptEntry::from_json_line(line);
  EXPECT_EQ(r.sequence, e.sequence);
  EXPECT_EQ(r.frame_index, 7u);
  EXPECT_EQ(r.status, e.status);
  EXPECT_EQ(r.raw_text, e.raw_text);
  EXPECT_EQ(r.box, e.box);
  EXPECT_EQ(r.prompt_rect, e.prompt_rect);
  EXPECT_EQ(r.frame_digest, "abc");
  EXPECT_EQ(r.to_json_line(), line);

  TranscriptEntry bare;
  bare.sequence = "s";
  bare.frame_index = 1;
  const TranscriptEntry br = TranscriptEntry::from_json_line(bare.to_json_line());
  EXPECT_FALSE(br.box);
  EXPECT_FALSE(br.prompt_rect);
}

TEST(Transcript, ReadFileAndScriptFromFile) {
  testing::TempDir dir;
  TranscriptEntry e;
  e.sequence = "s";
  e.frame_index = 2;
  e.raw_text = R"({"bbox_2d": [0, 0, 10, 10]})";
  testing::write_file(dir / "t.jsonl", e.to_json_line() + "\n\n");
  EXPECT_EQ(read_transcript(dir / "t.jsonl").size(), 1u);
  auto scripted = ScriptedLocalizer::from_file(dir / "t.jsonl");
  EXPECT_EQ(*scripted.localize(request("s", 2)).box, (BBox{0, 0, 10, 10}));
  testing::write_file(dir / "bad.jsonl", "{not json\n");
  EXPECT_ANY_THROW(read_transcript(dir / "bad.jsonl"));
}

TEST(ImageDigest, SensitiveToPixelsAndShape) {
  const cv::Mat a = testing::noise_image(10, 10, 1);
  cv::Mat b = a.clone();
  EXPECT_EQ(image_digest(a), image_digest(b));
  EXPECT_EQ(image_digest(a).size(), 16u);
  b.at<cv::Vec3b>(5, 5)[0] ^= 1;
  EXPECT_NE(image_digest(a), image_digest(b));
  EXPECT_NE(image_digest(a), image_digest(a.reshape(3, 5)));
}

}  // namespace
}  // namespace vltrack
