#include "test_support.hpp"

#include "gradarg/af_format.hpp"
#include "gradarg/corpus.hpp"
#include "gradarg/error.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gradarg;

namespace {

ParseResult parse(const std::string& text) { return parse_framework({text, "t.af"}); }

}  // namespace

TEST(AfFormat, MinimalDocumentGetsDefaults) {
  const auto r = parse("option R\noption not_R\nuser cg\npref cg R +\n");
  ASSERT_TRUE(r.ok()) << (r.errors.empty() ? "" : r.errors.front().message);
  const auto& f = *r.framework;
  EXPECT_EQ(f.arguments().size(), 2u);
  EXPECT_EQ(f.options(), (std::vector<ArgumentId>{"R", "not_R"}));
  const auto total = f.total_preferences();
  EXPECT_EQ(total.sign("cg", "R"), PreferenceSign::Positive);
  EXPECT_EQ(total.sign("cg", "not_R"), PreferenceSign::Indifferent);
  EXPECT_DOUBLE_EQ(f.at("R").base_score, 0.5);
}

TEST(AfFormat, UnknownReferenceReportsItsLine) {
  const auto r = parse("option R\n\natt X R\n");
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].code, ErrorCode::UnknownReference);
  EXPECT_EQ(r.errors[0].line, 3);
  EXPECT_EQ(r.errors[0].column, 5);
}

TEST(AfFormat, ReportsEveryIndependentError) {
  const auto r = parse(
      "option R\n"
      "arg A kind=robot\n"
      "arg B kind=task base=1.4\n"
      "att C R\n"
      "frobnicate\n"
      "arg 9x kind=task\n");
  ASSERT_FALSE(r.ok());
  std::set<int> lines;
  for (const auto& e : r.errors) lines.insert(e.line);
  EXPECT_EQ(lines, (std::set<int>{2, 3, 4, 5, 6}));
}

TEST(AfFormat, ForwardReferencesResolve) {
  const auto r = parse("att A R\narg A kind=task active=true\noption R\n");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.framework->find_relation("A", "R"));
}

TEST(AfFormat, NegationSignNormalised) {
  const auto r = parse("option R\noption ¬R\narg A kind=task\natt A ¬R\n");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.framework->is_option("not_R"));
  EXPECT_TRUE(r.framework->find_relation("A", "not_R"));
}

TEST(AfFormat, StructuralErrorsAreParseErrors) {
  const auto r = parse("option R\noption S\nsup R S\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors.front().code, ErrorCode::OptionHasOutgoing);
  const auto c = parse("option R\narg A kind=task\narg B kind=task\natt A B\natt B A\natt A R\n");
  ASSERT_FALSE(c.ok());
  EXPECT_EQ(c.errors.front().code, ErrorCode::Cycle);
}

TEST(AfFormat, CommentsAndQuotedHash) {
  const auto r = parse("# header\noption R label=\"a # b\" # trailing\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.framework->at("R").label, "a # b");
}

TEST(AfFormat, UnterminatedString) {
  const auto r = parse("option R label=\"oops\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors.front().code, ErrorCode::Syntax);
}

TEST(AfFormat, FormatErrorIncludesPosition) {
  const ParseError e{4, 7, ErrorCode::UnknownReference, "no such argument"};
  EXPECT_EQ(format_error(e, "x.af"), "x.af:4:7: UNKNOWN_REFERENCE: no such argument");
}

TEST(AfFormat, ParseOrThrow) {
  EXPECT_THROW(parse_framework_or_throw({"att X R\n", "x"}), Error);
}

TEST(AfFormat, RoundTripOnRandomFrameworks) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto f = test::random_parseable(rng);
    const auto text = serialize_framework(f);
    const auto back = parse_framework({text, "rt"});
    ASSERT_TRUE(back.ok()) << text;
    ASSERT_EQ(*back.framework, f) << text;
    ASSERT_EQ(serialize_framework(*back.framework), text);
  }
}

TEST(AfFormat, SerializationIsCanonical) {
  const auto a = parse("option R\noption S\narg B kind=task\narg A kind=task\natt B R\nsup A S\n");
  const auto b = parse("option R\noption S\narg A kind=task\nsup A S\narg B kind=task\natt B R\n");
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(serialize_framework(*a.framework), serialize_framework(*b.framework));
}

TEST(AfFormat, CorpusFilesRoundTrip) {
  for (const auto& name : {"frailty_scenario1", "frailty_scenario2"}) {
    const auto entry = load_corpus(name);
    const auto direct = parse_framework(entry.document);
    ASSERT_TRUE(direct.ok());
    const auto again = parse_framework({serialize_framework(*direct.framework), "again"});
    ASSERT_TRUE(again.ok());
    EXPECT_EQ(*again.framework, *direct.framework);
  }
}
