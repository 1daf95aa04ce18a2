#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "test_util.hpp"
#include "vltrack/dataset.hpp"
#include "vltrack/synthetic.hpp"

namespace vltrack {
namespace {

using testing::TempDir;
using testing::write_file;

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

TEST(ParseBoxRow, Separators) {
  EXPECT_EQ(parse_box_row("1,2,3,4", "f", 1), (BBox{1, 2, 3, 4}));
  EXPECT_EQ(parse_box_row("1.5\t2\t3\t4", "f", 1), (BBox{1.5, 2, 3, 4}));
  EXPECT_EQ(parse_box_row("  1 2 3 4 \r", "f", 1), (BBox{1, 2, 3, 4}));
  EXPECT_EQ(parse_box_row("1, 2, 3, 4", "f", 1), (BBox{1, 2, 3, 4}));
  EXPECT_TRUE(parse_box_row("0,0,0,0", "f", 1).degenerate());
  EXPECT_TRUE(parse_box_row("nan,nan,nan,nan", "f", 1).degenerate());
}

TEST(ParseBoxRow, Errors) {
  EXPECT_NE(error_of([] { parse_box_row("1,2,three,4", "gt.txt", 7); }).find("gt.txt:7"),
            std::string::npos);
  EXPECT_THROW(parse_box_row("1,2,3", "f", 1), DataError);
  EXPECT_THROW(parse_box_row("1,2,3,4,5", "f", 1), DataError);
  EXPECT_THROW(parse_box_row("1,,3,4", "f", 1), DataError);
  EXPECT_THROW(parse_box_row("1,2,-3,4", "f", 1), DataError);
}

TEST(NaturalSort, Numbers) {
  EXPECT_TRUE(natural_less("2.jpg", "10.jpg"));
  EXPECT_FALSE(natural_less("10.jpg", "2.jpg"));
  EXPECT_TRUE(natural_less("img_0009.png", "img_0010.png"));
  EXPECT_TRUE(natural_less("a.jpg", "b.jpg"));
}

TEST(LayoutConfig, PresetsAndFile) {
  EXPECT_EQ(LayoutConfig::resolve("tnl2k").image_dir, "imgs");
  const auto lt = LayoutConfig::resolve("tnllt");
  EXPECT_EQ(lt.language_file, "nlp.txt");
  EXPECT_EQ(lt.absence_files.size(), 2u);

  TempDir dir;
  write_file(dir / "custom.layout",
             "# custom\nname = mine\nimage_dir = frames\ngroundtruth = gt.csv\n"
             "language = desc.txt\nabsence_files = occ.txt, oov.txt\n"
             "extensions = .png\nframe_order = lexicographic\n");
  const auto c = LayoutConfig::resolve((dir / "custom.layout").string());
  EXPECT_EQ(c.name, "mine");
  EXPECT_EQ(c.image_dir, "frames");
  EXPECT_EQ(c.groundtruth_file, "gt.csv");
  EXPECT_EQ(c.language_file, "desc.txt");
  EXPECT_EQ(c.absence_files, (std::vector<std::string>{"occ.txt", "oov.txt"}));
  EXPECT_EQ(c.extensions, std::vector<std::string>{".png"});
  EXPECT_EQ(c.frame_order, FrameOrder::lexicographic);

  const auto again = LayoutConfig::parse(c.to_string(), "roundtrip");
  EXPECT_EQ(again.to_string(), c.to_string());

  EXPECT_THROW(LayoutConfig::parse("bogus = 1\n", "x"), DataError);
  EXPECT_THROW(LayoutConfig::parse("image_dir\n", "x"), DataError);
  EXPECT_THROW(LayoutConfig::resolve("no-such-preset"), DataError);
}

class SequenceFixture : public ::testing::Test {
 protected:
  TempDir dir;
  LayoutConfig layout = LayoutConfig::tnl2k();

  fs::path write(const std::string& name, SyntheticSpec spec = {}) {
    spec.name = name;
    write_synthetic_sequence(dir / name, layout, spec);
    return dir / name;
  }
};

TEST_F(SequenceFixture, LoadsSyntheticSequence) {
  SyntheticSpec spec;
  spec.n_frames = 12;
  spec.description = "the red square";
  const fs::path p = write("alpha", spec);
  const Sequence s = load_sequence(p, layout);
  EXPECT_EQ(s.name, "alpha");
  EXPECT_EQ(s.size(), 12u);
  EXPECT_EQ(s.groundtruth.size(), 12u);
  EXPECT_EQ(s.description, "the red square");
  EXPECT_EQ(s.image_size, (ImageSize{160, 120}));
  EXPECT_EQ(s.frames[1].filename(), "2.png");
  EXPECT_EQ(s.frames[9].filename(), "10.png");
  EXPECT_EQ(s.groundtruth[0], spec.start);

  const Sequence again = load_sequence(p, layout);
  EXPECT_EQ(again.frames, s.frames);
  EXPECT_EQ(again.groundtruth, s.groundtruth);
  EXPECT_EQ(again.absent, s.absent);
}

TEST_F(SequenceFixture, AbsenceIsUnionOfDegenerateAndFlags) {
  layout = LayoutConfig::tnllt();
  SyntheticSpec spec;
  spec.n_frames = 8;
  spec.absent_from = 3;
  spec.absent_to = 4;
  const fs::path p = write("beta", spec);
  // flag frame 6 while its box stays valid
  write_file(p / "out_of_view.txt", "0,0,0,0,0,1,0,0\n");
  const Sequence s = load_sequence(p, layout);
  EXPECT_EQ(s.absent, (std::vector<bool>{false, false, true, true, false, true, false, false}));
  EXPECT_FALSE(s.groundtruth[5].degenerate());
}

TEST_F(SequenceFixture, RowCountMismatch) {
  const fs::path p = write("gamma");
  write_file(p / "groundtruth.txt", "1,2,3,4\n1,2,3,4\n");
  EXPECT_NE(error_of([&] { load_sequence(p, layout); }).find("row-count mismatch"),
            std::string::npos);
}

TEST_F(SequenceFixture, FirstFrameMustBePresent) {
  SyntheticSpec spec;
  spec.absent_from = 1;
  spec.absent_to = 2;
  const fs::path p = write("delta", spec);
  EXPECT_THROW(load_sequence(p, layout), DataError);
}

TEST_F(SequenceFixture, MissingPieces) {
  const fs::path p = write("eps");
  fs::remove(p / "language.txt");
  EXPECT_THROW(load_sequence(p, layout), DataError);
  write_file(p / "language.txt", "   \n");
  EXPECT_THROW(load_sequence(p, layout), DataError);
  write_file(p / "language.txt", "\xEF\xBB\xBF  a cat  \nsecond line\n");
  EXPECT_EQ(load_sequence(p, layout).description, "a cat");
  fs::remove_all(p / "imgs");
  EXPECT_THROW(load_sequence(p, layout), DataError);
}

TEST_F(SequenceFixture, SplitOrderingAndFailures) {
  write("b");
  write("a");
  auto split = load_split(dir.path(), layout);
  ASSERT_EQ(split.sequences.size(), 2u);
  EXPECT_EQ(split.sequences[0].name, "a");
  EXPECT_EQ(split.sequences[1].name, "b");
}

TEST_F(SequenceFixture, OneCorruptAmongTen) {
  for (int i = 0; i < 10; ++i) write("s" + std::to_string(i));
  write_file(dir / "s4" / "groundtruth.txt", "garbage\n");
  const auto split = load_split(dir.path(), layout);
  EXPECT_EQ(split.sequences.size(), 9u);
  ASSERT_EQ(split.failures.size(), 1u);
  EXPECT_EQ(split.failures[0].sequence, "s4");
  EXPECT_FALSE(split.failures[0].reason.empty());
}

TEST(LoadSplit, EmptyRoot) {
  TempDir dir;
  EXPECT_NE(error_of([&] { load_split(dir.path(), LayoutConfig::tnl2k()); }).find("no sequences"),
            std::string::npos);
}

TEST(Results, Formatting) {
  EXPECT_EQ(format_results({"s", {{1, 2, 3, 4}}}), "1.00,2.00,3.00,4.00\n");
  EXPECT_EQ(format_results({"s", {{0.125, 10.5, 3.333, 4}, {}}}),
            "0.12,10.50,3.33,4.00\n0.00,0.00,0.00,0.00\n");
}

TEST(Results, RoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1000);
  ResultTrack t{"seq", {}};
  for (int i = 0; i < 100; ++i) t.boxes.push_back({u(rng), u(rng), u(rng), u(rng)});
  write_results(t, dir / "seq.txt");
  const ResultTrack r = read_results(dir / "seq.txt", "seq");
  ASSERT_EQ(r.boxes.size(), 100u);
  for (int i = 0; i < 100; ++i) {
    EXPECT_NEAR(r.boxes[i].x, t.boxes[i].x, 0.005);
    EXPECT_NEAR(r.boxes[i].y, t.boxes[i].y, 0.005);
    EXPECT_NEAR(r.boxes[i].w, t.boxes[i].w, 0.005);
    EXPECT_NEAR(r.boxes[i].h, t.boxes[i].h, 0.005);
  }
  // a written file is a fixed point
  write_results(r, dir / "again.txt");
  EXPECT_EQ(testing::read_file(dir / "again.txt"), testing::read_file(dir / "seq.txt"));
}

TEST(Results, MalformedLineNumber) {
  TempDir dir;
  write_file(dir / "r.txt", "1,2,3,4\n1,2,3,4\n1,2,three,4\n");
  const std::string err = error_of([&] { read_results(dir / "r.txt", "r"); });
  EXPECT_NE(err.find(":3"), std::string::npos) << err;
  EXPECT_THROW(read_results(dir / "missing.txt", "m"), DataError);
}

}  // namespace
}  // namespace vltrack
