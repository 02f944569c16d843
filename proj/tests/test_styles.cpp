#include <set>

#include <gtest/gtest.h>

#include "chopsticks/styles.hpp"

using namespace chopsticks;

namespace {

// Independent statement of the three rules: the thumb holds the upper
// stick; the other fingers that touch a stick read as a run of 1s then a
// run of 2s; both sticks get at least one non-thumb finger.
bool oracle_valid(const std::vector<int>& c) {
  if (c[0] != 1) return false;
  std::string seq;
  for (size_t i = 1; i < c.size(); ++i)
    if (c[i] != 0) seq += static_cast<char>('0' + c[i]);
  if (seq.find("21") != std::string::npos) return false;
  return seq.find('1') != std::string::npos && seq.find('2') != std::string::npos;
}

std::set<std::vector<int>> as_set(const std::vector<GrippingStyle>& v) {
  std::set<std::vector<int>> out;
  for (const GrippingStyle& s : v) out.insert(s.c);
  return out;
}

// The seventeen five-finger styles, frozen from the oracle above.
const std::set<std::vector<int>> kSeventeen = {
    {1, 0, 0, 1, 2}, {1, 0, 1, 0, 2}, {1, 0, 1, 1, 2}, {1, 0, 1, 2, 0}, {1, 0, 1, 2, 2},
    {1, 1, 0, 0, 2}, {1, 1, 0, 1, 2}, {1, 1, 0, 2, 0}, {1, 1, 0, 2, 2}, {1, 1, 1, 0, 2},
    {1, 1, 1, 1, 2}, {1, 1, 1, 2, 0}, {1, 1, 1, 2, 2}, {1, 1, 2, 0, 0}, {1, 1, 2, 0, 2},
    {1, 1, 2, 2, 0}, {1, 1, 2, 2, 2}};

}  // namespace

TEST(Styles, AllTuplesForFiveFingers) {
  const auto all = enumerate_all_styles(5);
  EXPECT_EQ(all.size(), 243u);
  EXPECT_EQ(as_set(all).size(), 243u);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
}

TEST(Styles, SeventeenValidFiveFingerStyles) {
  const auto valid = enumerate_valid_styles(5);
  EXPECT_EQ(valid.size(), 17u);
  EXPECT_EQ(as_set(valid), kSeventeen);
  EXPECT_TRUE(std::is_sorted(valid.begin(), valid.end()));
}

TEST(Styles, PredicateAgreesWithOracleOnEveryTuple) {
  for (int n = 2; n <= 6; ++n) {
    int count = 0;
    for (const GrippingStyle& s : enumerate_all_styles(n)) {
      EXPECT_EQ(is_valid_style(s).valid, oracle_valid(s.c)) << format_style(s);
      count += oracle_valid(s.c);
    }
    EXPECT_EQ(static_cast<int>(enumerate_valid_styles(n).size()), count) << n;
  }
}

TEST(Styles, CountFollowsClosedForm) {
  // k of the N-1 non-thumb fingers touch, and the 1/2 boundary has k-1
  // positions.
  auto choose = [](int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  for (int n = 2; n <= 7; ++n) {
    long expected = 0;
    for (int k = 2; k <= n - 1; ++k) expected += choose(n - 1, k) * (k - 1);
    EXPECT_EQ(static_cast<long>(enumerate_valid_styles(n).size()), expected) << n;
  }
}

TEST(Styles, RejectionReasons) {
  EXPECT_TRUE(is_valid_style({{1, 1, 1, 2, 0}}).valid);
  EXPECT_EQ(is_valid_style({{0, 1, 1, 2, 0}}).reason, StyleRejection::thumb_rule);
  EXPECT_EQ(is_valid_style({{2, 1, 1, 2, 0}}).reason, StyleRejection::thumb_rule);
  EXPECT_EQ(is_valid_style({{1, 2, 1, 2, 0}}).reason, StyleRejection::finger_crossing);
  EXPECT_EQ(is_valid_style({{1, 1, 1, 1, 0}}).reason, StyleRejection::missing_support);
  EXPECT_EQ(is_valid_style({{1, 0, 0, 0, 2}}).reason, StyleRejection::missing_support);
  EXPECT_EQ(is_valid_style({{1, 3, 1, 2, 0}}).reason, StyleRejection::bad_value);
  EXPECT_FALSE(is_valid_style({{1, 2, 1, 2, 0}}).message.empty());
}

TEST(Styles, ParseAndFormat) {
  EXPECT_EQ(parse_style("1,1,1,2,0").c, (std::vector<int>{1, 1, 1, 2, 0}));
  EXPECT_EQ(parse_style("(1, 0,1,2,0)").c, (std::vector<int>{1, 0, 1, 2, 0}));
  EXPECT_EQ(format_style(parse_style("(1,1,2,0,0)")), "1,1,2,0,0");
  EXPECT_THROW(parse_style(""), std::invalid_argument);
  EXPECT_THROW(parse_style("1,1,x"), std::invalid_argument);
  EXPECT_THROW(parse_style("1,,2"), std::invalid_argument);
}

TEST(Styles, ConventionalNames) {
  EXPECT_EQ(style_name(parse_style("1,1,1,2,0")), "standard");
  EXPECT_EQ(style_name(parse_style("1,1,1,1,2")), "forsaken pinky");
  EXPECT_EQ(style_name(parse_style("1,1,2,0,0")), "right-hand rule");
  EXPECT_EQ(style_name(parse_style("1,0,1,2,0")), "dino claws");
  EXPECT_EQ(style_name(parse_style("1,0,0,1,2")), "unnamed");
  EXPECT_FALSE(style_name(parse_style("1,1,2,2,2")).has_value());
  for (const char* named : {"1,1,1,2,0", "1,1,1,1,2", "1,1,2,0,0", "1,0,1,2,0", "1,0,0,1,2"})
    EXPECT_TRUE(is_valid_style(parse_style(named)).valid) << named;
}

TEST(Styles, ContactingFingers) {
  const GrippingStyle s = parse_style("1,0,1,2,0");
  EXPECT_EQ(s.contact_count(), 3);
  EXPECT_EQ(s.contacting_fingers(), (std::vector<int>{0, 2, 3}));
}
