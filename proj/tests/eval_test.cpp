#include "tracefacts/eval.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace tracefacts;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

// Independent recount: for each answer fact, scan the top N entries directly.
double recount(const RankedLists& ranked, const std::vector<AnswerSet>& answers, std::size_t n) {
    std::size_t hits = 0, total = 0;
    for (const auto& a : answers)
        for (const auto& f : a.facts) {
            ++total;
            const auto& list = ranked.at(a.link_id);
            for (std::size_t i = 0; i < std::min(n, list.size()); ++i) {
                const auto& [s, t] = list[i];
                if ((s == f.source && t == f.target) || (s == f.target && t == f.source)) {
                    ++hits;
                    break;
                }
            }
        }
    return total ? double(hits) / double(total) : 0.0;
}

CandidateFact cand(const std::string& s, const std::string& t, double tm = 0) {
    CandidateFact c;
    c.source_term = s;
    c.target_term = t;
    c.evidence.tm = tm;
    return c;
}

} // namespace

TEST(HitRatio, MatchesBruteForceRecount) {
    std::mt19937 gen(9);
    for (int round = 0; round < 200; ++round) {
        RankedLists ranked;
        std::vector<AnswerSet> answers;
        for (int l = 0; l < 5; ++l) {
            const std::string id = "L" + std::to_string(l);
            auto& list = ranked[id];
            const int len = gen() % 12;
            for (int i = 0; i < len; ++i) list.emplace_back("s" + std::to_string(gen() % 4), "t" + std::to_string(gen() % 4));
            AnswerSet a{id, {}};
            for (int k = gen() % 4; k > 0; --k)
                a.facts.push_back({"s" + std::to_string(gen() % 4), "t" + std::to_string(gen() % 4), std::nullopt});
            answers.push_back(a);
        }
        const auto c = hit_ratio(ranked, answers, 15);
        if (!c.defined) continue;
        for (std::size_t n = 1; n <= 15; ++n) ASSERT_NEAR(c.at(n), recount(ranked, answers, n), 1e-15) << n;
    }
}

TEST(HitRatio, LabelsAndOrientationIgnored) {
    RankedLists ranked{{"L", {{"b", "a"}, {"c", "d"}}}};
    const std::vector<AnswerSet> answers{{"L", {{"a", "b", "contains"}, {"x", "y", std::nullopt}}}};
    const auto c = hit_ratio(ranked, answers, 3);
    EXPECT_DOUBLE_EQ(c.at(1), 0.5);
    EXPECT_DOUBLE_EQ(c.generation_ceiling, 0.5);
}

TEST(HitRatio, UnknownLinkIsError) {
    EXPECT_THROW(hit_ratio({}, {{"nope", {}}}), NotFoundError);
}

TEST(HitRatio, UndefinedWithoutAnswers) {
    const auto c = hit_ratio({{"L", {{"a", "b"}}}}, {{"L", {}}});
    EXPECT_FALSE(c.defined);
    EXPECT_EQ(c.at(1), 0.0);
}

TEST(HitRatio, MacroAveragesPerLink) {
    RankedLists ranked{{"A", {{"a", "b"}}}, {"B", {{"x", "y"}}}};
    std::vector<AnswerSet> answers{{"A", {{"a", "b", {}}}}, {"B", {{"x", "y", {}}, {"p", "q", {}}, {"r", "s", {}}}}};
    EXPECT_DOUBLE_EQ(hit_ratio(ranked, answers, 1, Averaging::Micro).at(1), 2.0 / 4.0);
    EXPECT_DOUBLE_EQ(hit_ratio(ranked, answers, 1, Averaging::Macro).at(1), (1.0 + 1.0 / 3.0) / 2.0);
}

TEST(HitRatio, CurveIsMonotone) {
    RankedLists ranked{{"L", {{"a", "b"}, {"c", "d"}, {"e", "f"}}}};
    const auto c = hit_ratio(ranked, {{"L", {{"e", "f", {}}, {"a", "b", {}}}}}, 5);
    for (std::size_t n = 2; n <= 5; ++n) EXPECT_GE(c.at(n), c.at(n - 1));
    EXPECT_DOUBLE_EQ(c.at(5), 1.0);
    EXPECT_DOUBLE_EQ(c.at(100), 1.0);
}

TEST(RandomBaseline, DeterministicAndNearExpectation) {
    CandidateLists lists;
    for (int i = 0; i < 10; ++i) lists["L"].push_back(cand("s" + std::to_string(i), "t"));
    const std::vector<AnswerSet> answers{{"L", {{"s3", "t", {}}}}};
    const auto seeds = parse_seeds("1..400");
    const auto a = random_baseline(lists, answers, seeds, 10), b = random_baseline(lists, answers, seeds, 10);
    EXPECT_EQ(a.points, b.points);
    // one answer in a list of ten: P(hit at N) = N/10
    for (std::size_t n = 1; n <= 10; ++n) {
        const double p = n / 10.0, sigma = std::sqrt(p * (1 - p) / seeds.size());
        EXPECT_NEAR(a.at(n), p, 3 * sigma + 1e-12) << n;
    }
}

TEST(TechniqueCurves, FiveMethodsInOrder) {
    CandidateLists lists;
    lists["L"] = {cand("a", "b", 0.9), cand("c", "d", 0.05)};
    lists["L"][0].evidence.sem = {0.6, 0.6};
    const auto curves = technique_curves(lists, {{"L", {{"a", "b", {}}}}}, ConfidenceScheme{}, 2);
    ASSERT_EQ(curves.size(), 5u);
    EXPECT_EQ(curves[0].method, "SYN");
    EXPECT_EQ(curves[4].method, "heuristic");
    EXPECT_DOUBLE_EQ(curves[4].at(1), 1.0);
}

TEST(Seeds, Parsing) {
    EXPECT_EQ(parse_seeds("3..5"), (std::vector<std::uint64_t>{3, 4, 5}));
    EXPECT_EQ(parse_seeds("7,1,9"), (std::vector<std::uint64_t>{7, 1, 9}));
    EXPECT_THROW(parse_seeds("5..3"), ValidationError);
    EXPECT_THROW(parse_seeds("a,b"), ValidationError);
}

TEST(Answers, LoadNormalizesTerms) {
    TempDir dir;
    write_file(dir / "answers.jsonl",
               R"({"link_id":"L1","facts":[{"source":"Start Buttons","target":"Clinician","label":"press of"}]})"
               "\n");
    const auto a = load_answers(dir / "answers.jsonl");
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].facts[0].source, "start button");
    EXPECT_EQ(a[0].facts[0].target, "clinician");
    write_file(dir / "bad.jsonl", R"({"link_id":"L1"})");
    EXPECT_THROW(load_answers(dir / "bad.jsonl"), ParseError);
}

TEST(CurveOutput, CsvAndDat) {
    HitRatioCurve c{"TM", {0.25, 0.5}, 0.5, true};
    std::ostringstream csv, dat;
    write_curves_csv({c}, csv);
    write_curves_dat({c}, dat);
    EXPECT_EQ(csv.str(), "method,N,hit_ratio\nTM,1,0.25\nTM,2,0.5\n");
    EXPECT_EQ(dat.str(), "# N TM\n1 0.25\n2 0.5\n");
}
