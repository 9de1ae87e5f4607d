#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace brease;

TEST(ParseTrials, PaperRows) {
  const auto c = parse_trials("study,y0,N0,y1,N1\nphs,26,11034,10,11037\nc19,169,20172,9,19965\n");
  ASSERT_EQ(c.studies.size(), 2u);
  EXPECT_EQ(c.studies[0].id, "phs");
  EXPECT_EQ(c.studies[0].data, (TrialData{26, 11034, 10, 11037}));
  EXPECT_EQ(c.studies[1].data, (TrialData{169, 20172, 9, 19965}));
}

TEST(ParseTrials, NegativeCountIsValidationError) {
  EXPECT_THROW(parse_trials("study,y0,N0,y1,N1\nbad,-1,10,0,10\n"), ValidationError);
}

TEST(ParseTrials, ReportsLineNumber) {
  try {
    parse_trials("study,y0,N0,y1,N1\n# note\nok,1,2,1,2\nbad,x,2,1,2\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(ParseTrials, CommentsBomAndCrlf) {
  const auto c = parse_trials("\xEF\xBB\xBFstudy,y0,N0,y1,N1\r\n\r\n# skipped\r\na, 1 ,4,2,4\r\n");
  ASSERT_EQ(c.studies.size(), 1u);
  EXPECT_EQ(c.studies[0].data, (TrialData{1, 4, 2, 4}));
}

TEST(ParseTrials, Rejects) {
  EXPECT_THROW(parse_trials("id,y0,N0,y1,N1\na,1,2,1,2\n"), ParseError);
  EXPECT_THROW(parse_trials("study,y0,N0,y1,N1\na,1,2,1\n"), ParseError);
  EXPECT_THROW(parse_trials("study,y0,N0,y1,N1\na,3,2,1,2\n"), ValidationError);
  EXPECT_THROW(parse_trials("study,y0,N0,y1,N1\na,1,2,1,2\na,1,2,1,2\n"), ValidationError);
  EXPECT_THROW(parse_trials(""), ParseError);
}

TEST(ParseTrials, RoundTrip) {
  StudyCorpus c;
  c.studies.push_back({"x", {0, 0, 0, 0}});
  c.studies.push_back({"y", {3, 10, 4, 12}});
  const auto back = parse_trials(serialize_trials(c));
  ASSERT_EQ(back.studies.size(), 2u);
  EXPECT_EQ(back.studies[1].id, "y");
  EXPECT_EQ(back.studies[1].data, c.studies[1].data);
  EXPECT_EQ(serialize_trials(back), serialize_trials(c));
}

TEST(Validate, Examples) {
  EXPECT_TRUE(validate({0, 0, 0, 0}).empty());
  EXPECT_TRUE(validate({20, 1000, 40, 1000}).empty());
  const auto v = validate({5, 3, 0, 1});
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v.front().find("y0 > N0"), std::string::npos);
  EXPECT_THROW(require_valid(TrialData{0, -1, 0, 0}), ValidationError);
}

TEST(Fingerprint, DistinguishesArms) {
  EXPECT_EQ(fingerprint({1, 2, 3, 4}), fingerprint({1, 2, 3, 4}));
  EXPECT_NE(fingerprint({1, 2, 3, 4}), fingerprint({3, 4, 1, 2}));
}

TEST(Strata, ParseAndValidate) {
  const auto s = parse_strata("stratum,y0,N0,y1,N1\nyoung,10,100,2,100\nold,5,50,3,50\n");
  ASSERT_EQ(s.strata.size(), 2u);
  EXPECT_EQ(s.strata[1].label, "old");
  EXPECT_EQ(parse_strata(serialize_strata(s)).strata[0].data, s.strata[0].data);
  EXPECT_THROW(parse_strata("stratum,y0,N0,y1,N1\n"), ValidationError);
  EXPECT_THROW(parse_strata("stratum,y0,N0,y1,N1\na,1,2,1,2\na,1,3,1,3\n"), ValidationError);
}

TEST(Strata, BundledFileParses) {
  const auto s = parse_strata(read_text_file(BREASE_DATA_DIR "/covid_age_strata.csv"));
  EXPECT_EQ(s.strata.size(), 4u);
}
