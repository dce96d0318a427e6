#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rotocr/error.hpp"
#include "rotocr/metrics.hpp"

using namespace rotocr;

TEST(EditDistance, Basics) {
    EXPECT_EQ(edit_distance("abc", "abc"), 0u);
    EXPECT_EQ(edit_distance("", "abc"), 3u);
    EXPECT_EQ(edit_distance("abc", ""), 3u);
    EXPECT_EQ(edit_distance("kitten", "sitting"), oracle::recursive_edit_distance(U"kitten", U"sitting"));
    EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
}

TEST(EditDistance, CountsCodePointsNotBytes) {
    EXPECT_EQ(edit_distance("crème", "creme"), 1u);
    EXPECT_EQ(edit_distance("Ωmega", "omega"), 1u);
    EXPECT_EQ(edit_distance("日本", ""), 2u);
}

TEST(EditDistance, ExhaustiveAgainstRecursiveOracle) {
    const auto strings = oracle::all_strings("abc", 4);
    for (const auto& a : strings) {
        for (const auto& b : strings) {
            ASSERT_EQ(edit_distance(a, b), oracle::recursive_edit_distance(oracle::widen(a), oracle::widen(b)))
                << a << " / " << b;
        }
    }
}

TEST(EditDistance, MetricAxioms) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> len(0, 8), ch(0, 3);
    auto word = [&] {
        std::string s(static_cast<std::size_t>(len(rng)), 'a');
        for (char& c : s) c = static_cast<char>('a' + ch(rng));
        return s;
    };
    for (int i = 0; i < 2000; ++i) {
        const std::string a = word(), b = word(), c = word();
        const std::size_t ab = edit_distance(a, b);
        EXPECT_EQ(ab, edit_distance(b, a));
        EXPECT_EQ(ab == 0, a == b);
        EXPECT_LE(edit_distance(a, c), ab + edit_distance(b, c));
    }
}

TEST(Evaluate, AllCorrect) {
    const std::vector<EvalSample> s{{"1", "salt", "salt"}, {"2", "Olive Oil", "olive oil"}};
    const EvalReport r = evaluate(s);
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.avg_ed, 0.0);
    EXPECT_EQ(r.norm_ed, 0.0);
    EXPECT_EQ(r.samples, 2u);
    EXPECT_LT(evaluate(s, true).accuracy, 1.0);
}

TEST(Evaluate, SingleMistake) {
    const EvalReport r = evaluate(std::vector<EvalSample>{{"1", "cart", "cat"}});
    EXPECT_EQ(r.accuracy, 0.0);
    EXPECT_EQ(r.avg_ed, 1.0);
    EXPECT_EQ(r.norm_ed, 0.25);
}

TEST(Evaluate, MixedSamples) {
    const EvalReport r = evaluate(std::vector<EvalSample>{{"1", "ab", "ab"}, {"2", "abcd", ""}});
    EXPECT_EQ(r.accuracy, 0.5);
    EXPECT_EQ(r.avg_ed, 2.0);
    EXPECT_EQ(r.norm_ed, 0.5);
}

TEST(Evaluate, AllEmptyPredictionsGiveNormEdOne) {
    const EvalReport r = evaluate(std::vector<EvalSample>{{"1", "salt", ""}, {"2", "olive oil", ""}, {"3", "é", ""}});
    EXPECT_EQ(r.norm_ed, 1.0);
    EXPECT_EQ(r.accuracy, 0.0);
}

TEST(Evaluate, WhitespaceIsSignificant) {
    EXPECT_EQ(evaluate(std::vector<EvalSample>{{"1", "olive oil", "oliveoil"}}).avg_ed, 1.0);
}

TEST(Evaluate, PermutationInvariant) {
    std::vector<EvalSample> s{{"1", "salt", "sal"}, {"2", "pepper", "pepper"}, {"3", "oil", ""}, {"4", "rice", "ricE"}};
    const EvalReport ref = evaluate(s);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(s.begin(), s.end(), rng);
        const EvalReport r = evaluate(s);
        EXPECT_DOUBLE_EQ(r.accuracy, ref.accuracy);
        EXPECT_DOUBLE_EQ(r.avg_ed, ref.avg_ed);
        EXPECT_DOUBLE_EQ(r.norm_ed, ref.norm_ed);
    }
}

TEST(Evaluate, Errors) {
    try {
        evaluate(std::vector<EvalSample>{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Eval);
    }
    EXPECT_THROW(evaluate(std::vector<EvalSample>{{"1", "", "x"}}), Error);
}

TEST(Match, Basics) {
    const GroundTruth g{"g", Quad::rect(0, 0, 10, 10), "salt"};
    const MergeCandidate p{Quad::rect(0, 0, 10, 9), "sal", 0.9, 0.9, 0.9, 0};
    const auto paired = match_predictions(std::vector<MergeCandidate>{p}, std::vector<GroundTruth>{g});
    ASSERT_EQ(paired.size(), 1u);
    EXPECT_EQ(paired[0].prediction, "sal");
    const auto none = match_predictions({}, std::vector<GroundTruth>{g});
    ASSERT_EQ(none.size(), 1u);
    EXPECT_EQ(none[0].prediction, "");
    EXPECT_EQ(none[0].ground_truth, "salt");
}

TEST(Match, CrossedIousPairGreedily) {
    const GroundTruth g1{"g1", Quad::rect(0, 0, 10, 10), "one"};
    const GroundTruth g2{"g2", Quad::rect(3.5, 0, 13.5, 10), "two"};
    const MergeCandidate p1{Quad::rect(0, 0, 10, 9), "p1", 1, 1, 1, 0};
    const MergeCandidate p2{Quad::rect(2.5, 0, 12.5, 10), "p2", 1, 1, 1, 0};
    // 90/100, 75/125, 90/110 by hand
    ASSERT_NEAR(iou(g1.box, p1.box), 0.9, 1e-12);
    ASSERT_NEAR(iou(g1.box, p2.box), 0.6, 1e-12);
    ASSERT_NEAR(iou(g2.box, p2.box), 90.0 / 110.0, 1e-12);
    ASSERT_LT(iou(g2.box, p1.box), kMatchIou);
    const auto out = match_predictions(std::vector<MergeCandidate>{p2, p1}, std::vector<GroundTruth>{g1, g2});
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].prediction, "p1");
    EXPECT_EQ(out[1].prediction, "p2");
}

TEST(Match, BelowThresholdUnmatched) {
    const GroundTruth g{"g", Quad::rect(0, 0, 10, 10), "salt"};
    const MergeCandidate p{Quad::rect(5, 0, 15, 10), "salt", 1, 1, 1, 0};
    ASSERT_LT(iou(g.box, p.box), kMatchIou);
    EXPECT_EQ(match_predictions(std::vector<MergeCandidate>{p}, std::vector<GroundTruth>{g})[0].prediction, "");
}

TEST(Match, EachPredictionUsedOnce) {
    const GroundTruth g1{"g1", Quad::rect(0, 0, 10, 10), "a"};
    const GroundTruth g2{"g2", Quad::rect(0, 0, 10, 10), "b"};
    const MergeCandidate p{Quad::rect(0, 0, 10, 10), "a", 1, 1, 1, 0};
    const auto out = match_predictions(std::vector<MergeCandidate>{p}, std::vector<GroundTruth>{g1, g2});
    EXPECT_EQ(out[0].prediction, "a");
    EXPECT_EQ(out[1].prediction, "");
}

TEST(Report, TableAndCsv) {
    const std::vector<EvalReport> rows{{"baseline", 0.2, 3.5, 0.61, 600}, {"rotate-merge", 1.0, 0.0, 0.0, 600}};
    const std::string table = format_report_table(rows);
    EXPECT_NE(table.find("Method"), std::string::npos);
    EXPECT_NE(table.find("baseline"), std::string::npos);
    EXPECT_NE(table.find("1.000"), std::string::npos);
    EXPECT_EQ(format_report_csv(rows),
              "method,accuracy,avg_ed,norm_ed,n\n"
              "baseline,0.200000,3.500000,0.610000,600\n"
              "rotate-merge,1.000000,0.000000,0.000000,600\n");
}
