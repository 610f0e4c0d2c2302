#include "tracefacts/topics.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace tracefacts;

namespace {

// Two disjoint vocabularies; every document draws from exactly one.
std::vector<std::vector<std::string>> planted_corpus() {
    const std::vector<std::string> fluid = {"infusion", "drug", "flow", "dose", "reservoir"};
    const std::vector<std::string> power = {"battery", "charge", "voltage", "current", "adapter"};
    std::vector<std::vector<std::string>> docs;
    SplitMix64 rng(11);
    for (int d = 0; d < 40; ++d) {
        const auto& words = d % 2 ? power : fluid;
        std::vector<std::string> doc;
        for (int i = 0; i < 30; ++i) doc.push_back(words[rng.below(words.size())]);
        docs.push_back(std::move(doc));
    }
    return docs;
}

LdaParams small(std::size_t k = 2) {
    LdaParams p;
    p.k = k;
    p.iterations = 200;
    p.alpha = 0.5;
    return p;
}

} // namespace

TEST(Lda, RecoversPlantedTopics) {
    const auto m = train_lda(planted_corpus(), small());
    const std::set<std::string> fluid = {"infusion", "drug", "flow", "dose", "reservoir"};
    for (std::size_t j = 0; j < 2; ++j) {
        const auto top = m.top_terms(j, 5);
        const bool first_fluid = fluid.count(top[0].first) > 0;
        for (const auto& [w, p] : top) EXPECT_EQ(fluid.count(w) > 0, first_fluid) << "topic " << j << " mixes " << w;
    }
    EXPECT_GT(m.tm_score("infusion", "dose"), 0.9);
    EXPECT_LT(m.tm_score("infusion", "battery"), 0.1);
}

TEST(Lda, DistributionsNormalized) {
    const auto m = train_lda(planted_corpus(), small(3));
    for (const auto& row : m.phi()) {
        double sum = 0;
        for (double x : row) {
            EXPECT_GT(x, 0.0);
            sum += x;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
    ASSERT_EQ(m.theta().size(), 40u);
    for (const auto& row : m.theta()) {
        double sum = 0;
        for (double x : row) sum += x;
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(Lda, SameSeedSameModel) {
    const auto docs = planted_corpus();
    EXPECT_EQ(train_lda(docs, small()).to_json().dump(), train_lda(docs, small()).to_json().dump());
    auto other = small();
    other.seed = 43;
    EXPECT_NE(train_lda(docs, small()).to_json().dump(), train_lda(docs, other).to_json().dump());
}

TEST(Lda, JsonRoundTripPreservesScores) {
    const auto m = train_lda(planted_corpus(), small());
    const auto back = TopicModel::from_json(nlohmann::json::parse(m.to_json().dump()));
    EXPECT_EQ(back.to_json().dump(), m.to_json().dump());
    EXPECT_EQ(back.tm_score("drug", "flow"), m.tm_score("drug", "flow"));
}

TEST(Lda, TopTermsBounds) {
    const auto m = train_lda(planted_corpus(), small());
    EXPECT_EQ(m.top_terms(0).size(), 10u);  // whole vocabulary when smaller than 20
    EXPECT_THROW(m.top_terms(2), ValidationError);
}

TEST(Lda, Errors) {
    EXPECT_THROW(train_lda({}, small()), ValidationError);
    EXPECT_THROW(train_lda({{}, {}}, small()), ValidationError);
    EXPECT_THROW(train_lda(planted_corpus(), small(1)), ValidationError);
    EXPECT_THROW(TopicModel::from_json({{"k", 2}}), ValidationError);
}

TEST(TmScore, Properties) {
    const auto m = train_lda(planted_corpus(), small(4));
    const std::vector<std::string> terms = {"infusion", "drug", "battery", "voltage", "drug reservoir", "battery charge",
                                            "unknown", "unknown drug"};
    for (const auto& a : terms)
        for (const auto& b : terms) {
            const double s = m.tm_score(a, b);
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, 1.0);
            EXPECT_DOUBLE_EQ(s, m.tm_score(b, a));
        }
    EXPECT_NEAR(m.tm_score("drug", "drug"), 1.0, 1e-12);
    EXPECT_EQ(m.tm_score("unknown", "drug"), 0.0);
}

TEST(TmScore, MultiwordTermAveragesConstituents) {
    const auto m = train_lda(planted_corpus(), small());
    const auto v = m.term_vector("drug reservoir");
    const auto a = m.term_vector("drug"), b = m.term_vector("reservoir");
    for (std::size_t j = 0; j < m.k(); ++j) EXPECT_NEAR(v[j], 0.5 * (a[j] + b[j]), 1e-15);
    // an unknown word still counts in the denominator
    const auto u = m.term_vector("unknown drug");
    for (std::size_t j = 0; j < m.k(); ++j) EXPECT_NEAR(u[j], 0.5 * a[j], 1e-15);
}

TEST(TmScore, TruncatedModeKeepsOnlyTopTerms) {
    // a vocabulary wider than 20 so truncation bites
    std::vector<std::vector<std::string>> docs;
    for (int d = 0; d < 10; ++d) {
        std::vector<std::string> doc;
        for (int w = 0; w < 30; ++w) doc.push_back("w" + std::to_string(w + (d % 2) * 30));
        docs.push_back(doc);
    }
    const auto m = train_lda(docs, small());
    std::size_t nonzero = 0;
    for (int w = 0; w < 60; ++w) {
        const auto v = m.term_vector("w" + std::to_string(w), TermVectorMode::TopTruncated);
        for (double x : v) nonzero += x > 0;
    }
    EXPECT_EQ(nonzero, 2 * kTopTermsPerTopic);
}

TEST(LdaTokens, MergesDomainTermsAndDropsStopwords) {
    const auto st = CorpusStats::build({{"drug reservoir", 5}}, {{"thing", 1000}});
    const auto toks = lda_tokens(tokenize_and_tag("The drug reservoir is empty."), st);
    EXPECT_EQ(toks, (std::vector<std::string>{"drug reservoir", "empty"}));
}
