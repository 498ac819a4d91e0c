#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "tabletop/common/angles.hpp"
#include "tabletop/common/edt.hpp"
#include "tabletop/common/errors.hpp"
#include "tabletop/common/image.hpp"
#include "tabletop/common/report.hpp"
#include "tabletop/common/rng.hpp"
#include "tabletop/common/strings.hpp"

using namespace tabletop;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "tabletop_test_common";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("trim strips surrounding whitespace only") {
  CHECK(trim("  hello  ") == "hello");
  CHECK(trim("\t a b \n") == "a b");
  CHECK(trim("") == "");
  CHECK(trim("   ") == "");
  CHECK(trim("x") == "x");
}

TEST_CASE("split on separator keeps empty fields") {
  CHECK(split("a,b,c", ',') == std::vector<std::string>{"a", "b", "c"});
  CHECK(split("a,,c", ',') == std::vector<std::string>{"a", "", "c"});
  CHECK(split("", ',') == std::vector<std::string>{""});
  CHECK(split("abc", ',') == std::vector<std::string>{"abc"});
}

TEST_CASE("split_lines keeps empty segments and strips CR") {
  // a trailing newline yields a final empty segment; consumers skip blanks
  CHECK(split_lines("one\ntwo\n") == std::vector<std::string>{"one", "two", ""});
  CHECK(split_lines("one\ntwo") == std::vector<std::string>{"one", "two"});
  CHECK(split_lines("a\r\nb") == std::vector<std::string>{"a", "b"});
  CHECK(split_lines("") == std::vector<std::string>{""});
  CHECK(split_lines("\n") == std::vector<std::string>{"", ""});
}

TEST_CASE("join is the inverse of split") {
  const std::vector<std::string> parts{"x", "y", "z"};
  CHECK(join(parts, ",") == "x,y,z");
  CHECK(join({}, ",") == "");
  CHECK(join({"solo"}, ", ") == "solo");
}

TEST_CASE("to_lower") {
  CHECK(to_lower("MiXeD Case 42") == "mixed case 42");
}

TEST_CASE("format_double picks the shortest exact form") {
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(35.25) == "35.25");
  CHECK(format_double(-0.1) == "-0.1");
  CHECK(format_double(0.0) == "0");
}

TEST_CASE("format_double round-trips arbitrary doubles exactly") {
  Rng rng(123);
  for (int i = 0; i < 1000; ++i) {
    // span many magnitudes, including negatives and tiny values
    const double mag = std::pow(10.0, rng.uniform(-12.0, 12.0));
    const double v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform() * mag;
    const auto parsed = parse_double(format_double(v));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == v);
  }
}

TEST_CASE("parse_double consumes the whole token or fails") {
  CHECK(parse_double("3.5") == 3.5);
  CHECK(parse_double("  -2e3 ") == -2000.0);
  CHECK_FALSE(parse_double("3.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK_FALSE(parse_double("1 2").has_value());
  CHECK_FALSE(parse_double("nanx").has_value());
}

TEST_CASE("parse_int rejects fractions and junk") {
  CHECK(parse_int("42") == 42);
  CHECK(parse_int(" -7 ") == -7);
  CHECK_FALSE(parse_int("4.2").has_value());
  CHECK_FALSE(parse_int("seven").has_value());
  CHECK_FALSE(parse_int("").has_value());
}

TEST_CASE("angle helpers") {
  CHECK(deg2rad(180.0) == doctest::Approx(kPi));
  CHECK(rad2deg(kPi / 2) == doctest::Approx(90.0));
  CHECK(normalize_deg(190.0) == doctest::Approx(-170.0));
  CHECK(normalize_deg(-180.0) == doctest::Approx(180.0));
  CHECK(normalize_deg(720.0) == 0.0);
  CHECK(normalize_deg(180.0) == 180.0);
  // canonical interval is half-open: (-180, 180]
  CHECK(normalize_deg(-540.0) == 180.0);
}

TEST_CASE("hash_str matches the published FNV-1a vectors") {
  CHECK(hash_str("") == 0xcbf29ce484222325ull);
  CHECK(hash_str("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("derive_seed is stable and stream-separated") {
  CHECK(derive_seed(7, "alpha") == derive_seed(7, "alpha"));
  CHECK(derive_seed(7, "alpha") != derive_seed(7, "beta"));
  CHECK(derive_seed(7, "alpha") != derive_seed(8, "alpha"));
}

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  bool all_equal = true;
  bool any_diff_from_c = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    if (va != b.next_u64()) all_equal = false;
    if (va != c.next_u64()) any_diff_from_c = true;
  }
  CHECK(all_equal);
  CHECK(any_diff_from_c);
}

TEST_CASE("rng uniform stays in [0, 1) with a sane mean") {
  Rng rng(5);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("rng uniform_int covers the inclusive range") {
  Rng rng(9);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    const int v = rng.uniform_int(2, 5);
    REQUIRE(v >= 2);
    REQUIRE(v <= 5);
    seen.insert(v);
  }
  CHECK(seen == std::set<int>{2, 3, 4, 5});
  CHECK(rng.uniform_int(3, 3) == 3);
}

TEST_CASE("rng normal has the requested moments") {
  Rng rng(11);
  const int n = 40000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal(2.0, 3.0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sq / n - mean * mean);
  CHECK(mean == doctest::Approx(2.0).epsilon(0.03));
  CHECK(stddev == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("rng fork gives independent streams without disturbing the parent") {
  Rng parent(77);
  Rng undisturbed(77);
  Rng fa = parent.fork("a");
  Rng fb = parent.fork("b");
  CHECK(fa.next_u64() != fb.next_u64());
  // forking twice consumed nothing from the parent
  CHECK(parent.next_u64() == undisturbed.next_u64());
  // same stream name reproduces the same child
  Rng again(77);
  Rng fa2 = again.fork("a");
  Rng fa3 = Rng(77).fork("a");
  CHECK(fa2.next_u64() == fa3.next_u64());
}

namespace {

// quadratic-time reference: exact squared distance to the nearest zero pixel
Image<double> edt_oracle(const MaskImage& mask) {
  const int w = mask.width(), h = mask.height();
  Image<double> out(w, h, 0.0);
  std::vector<std::pair<int, int>> zeros;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (!mask.at(x, y)) zeros.emplace_back(x, y);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      double best = 1e30;
      for (const auto& [zx, zy] : zeros) {
        const double dx = x - zx, dy = y - zy;
        best = std::min(best, dx * dx + dy * dy);
      }
      out.at(x, y) = best;
    }
  }
  return out;
}

MaskImage random_mask(Rng& rng, int w, int h, double fill) {
  MaskImage m(w, h, 0);
  for (auto& px : m.data()) px = rng.uniform() < fill ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("squared_distance_transform equals the brute-force oracle") {
  Rng rng(314);
  for (int round = 0; round < 12; ++round) {
    const int w = rng.uniform_int(5, 28);
    const int h = rng.uniform_int(5, 24);
    const MaskImage mask = random_mask(rng, w, h, rng.uniform(0.2, 0.9));
    const Image<double> got = squared_distance_transform(mask);
    const Image<double> want = edt_oracle(mask);
    REQUIRE(got.width() == w);
    REQUIRE(got.height() == h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        CHECK(got.at(x, y) == want.at(x, y));  // exact: small integers in doubles
  }
}

TEST_CASE("squared_distance_transform edge cases") {
  MaskImage empty(6, 4, 0);
  const auto zeros = squared_distance_transform(empty);
  for (double v : zeros.data()) CHECK(v == 0.0);

  MaskImage full(6, 4, 1);
  const auto saturated = squared_distance_transform(full);
  for (double v : saturated.data()) {
    CHECK(std::isfinite(v));
    CHECK(v > 6.0 * 6.0 + 4.0 * 4.0);  // beyond any in-image distance
  }

  MaskImage single(5, 5, 1);
  single.at(2, 2) = 0;
  const auto star = squared_distance_transform(single);
  CHECK(star.at(2, 2) == 0.0);
  CHECK(star.at(4, 2) == 4.0);
  CHECK(star.at(0, 0) == 8.0);
}

TEST_CASE("pgm mask round-trip preserves the foreground exactly") {
  Rng rng(21);
  const auto dir = temp_dir();
  for (int round = 0; round < 4; ++round) {
    const MaskImage mask = random_mask(rng, rng.uniform_int(3, 40), rng.uniform_int(3, 30), 0.4);
    const auto path = dir / ("mask" + std::to_string(round) + ".pgm");
    write_pgm(mask, path);
    const MaskImage back = read_pgm(path);
    CHECK(back == mask);  // reader normalizes to 0/1, same as what we wrote
  }
}

TEST_CASE("read_pgm accepts plain-text P2 with comments") {
  const auto path = temp_dir() / "hand.pgm";
  {
    FILE* f = std::fopen(path.string().c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fputs("P2\n# hand-written\n3 2\n255\n0 255 0\n128 0 7\n", f);
    std::fclose(f);
  }
  const MaskImage img = read_pgm(path);
  REQUIRE(img.width() == 3);
  REQUIRE(img.height() == 2);
  CHECK(img.at(0, 0) == 0);
  CHECK(img.at(1, 0) == 1);
  CHECK(img.at(0, 1) == 1);  // any nonzero sample is foreground
  CHECK(img.at(2, 1) == 1);
}

TEST_CASE("read_pgm rejects garbage") {
  const auto dir = temp_dir();
  const auto bad_magic = dir / "bad_magic.pgm";
  {
    FILE* f = std::fopen(bad_magic.string().c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fputs("P6\n2 2\n255\nxxxx", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_pgm(bad_magic), Error);

  const auto truncated = dir / "short.pgm";
  {
    FILE* f = std::fopen(truncated.string().c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fputs("P5\n4 4\n255\nab", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_pgm(truncated), Error);
  CHECK_THROWS_AS(read_pgm(dir / "does_not_exist.pgm"), Error);
}

TEST_CASE("write_pgm_scaled maps the finite range onto 0..255") {
  Image<double> field(3, 1, 0.0);
  field.at(0, 0) = 1.0;
  field.at(1, 0) = 3.0;
  field.at(2, 0) = 2.0;
  const auto path = temp_dir() / "scaled.pgm";
  write_pgm_scaled(field, path);
  // read raw bytes back: header then 3 samples
  FILE* f = std::fopen(path.string().c_str(), "rb");
  REQUIRE(f != nullptr);
  char header[32] = {};
  REQUIRE(std::fread(header, 1, 11, f) == 11);  // "P5\n3 1\n255\n"
  unsigned char px[3];
  REQUIRE(std::fread(px, 1, 3, f) == 3);
  std::fclose(f);
  CHECK(std::string(header, 3) == "P5\n");
  CHECK(px[0] == 0);
  CHECK(px[1] == 255);
  CHECK(px[2] == 128);
}

TEST_CASE("mask_area and mask_centroid") {
  MaskImage m(5, 4, 0);
  m.at(1, 1) = 1;
  m.at(3, 1) = 1;
  m.at(2, 3) = 1;
  CHECK(mask_area(m) == 3);
  const auto [cx, cy] = mask_centroid(m);
  CHECK(cx == doctest::Approx(2.0));
  CHECK(cy == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("validation report summary lines up indices and messages") {
  ValidationReport report;
  CHECK(report.ok());
  CHECK(report.summary() == "");
  report.issues.push_back({-1, "empty-plan", "plan has no steps"});
  report.issues.push_back({2, "unknown-object", "unknown object 'ghost'"});
  CHECK_FALSE(report.ok());
  CHECK(report.summary() == "plan has no steps; step 2: unknown object 'ghost'");
}
