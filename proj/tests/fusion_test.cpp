#include "tracefacts/fusion.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace tracefacts;
using testsupport::D1R1;

namespace {

std::vector<CandidateFact> mine_fixture(const D1R1& f, const ConfidenceScheme& scheme = {}) {
    return mine_link(f.link, f.source_terms, f.target_terms, f.evidence, scheme);
}

} // namespace

TEST(Fusion, StartButtonLinkRanking) {
    const D1R1 f;
    const auto ranked = mine_fixture(f);
    const auto& expected = testsupport::start_button_ranking();
    ASSERT_EQ(ranked.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        SCOPED_TRACE(i);
        EXPECT_EQ(ranked[i].rank, i + 1);
        EXPECT_EQ(ranked[i].source_term, expected[i].source);
        EXPECT_EQ(ranked[i].target_term, expected[i].target);
        EXPECT_EQ(ranked[i].relation_label().value_or(""), expected[i].relation);
        EXPECT_DOUBLE_EQ(ranked[i].conf, expected[i].conf);
    }
}

TEST(Fusion, GenerateSkipsSelfPairsAndDuplicates) {
    D1R1 f;
    auto c = generate_candidates(f.link, {"alarm", "alarm", "pca pump"}, {"alarm", "clinician"}, f.evidence);
    ASSERT_EQ(c.size(), 3u);
    for (const auto& x : c) EXPECT_NE(x.source_term, x.target_term);
}

TEST(Fusion, FilterUsesBetterSemanticChannel) {
    D1R1 f;
    auto& p = f.evidence.pairs[{"pca pump", "alarm"}];
    p.sem = {0.1, 0.25};  // only aw clears 0.2
    const auto ranked = mine_fixture(f);
    EXPECT_TRUE(std::any_of(ranked.begin(), ranked.end(),
                            [](const CandidateFact& c) { return c.source_term == "pca pump" && c.target_term == "alarm"; }));
    p.sem = {0.1, 0.19};
    const auto fewer = mine_fixture(f);
    EXPECT_EQ(fewer.size(), ranked.size() - 1);
}

TEST(Fusion, OrderIndependentOfTermPermutation) {
    D1R1 f;
    const auto base = mine_fixture(f);
    std::mt19937 gen(3);
    for (int round = 0; round < 50; ++round) {
        std::shuffle(f.source_terms.begin(), f.source_terms.end(), gen);
        std::shuffle(f.target_terms.begin(), f.target_terms.end(), gen);
        const auto again = mine_fixture(f);
        ASSERT_EQ(again.size(), base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            EXPECT_EQ(again[i].source_term, base[i].source_term);
            EXPECT_EQ(again[i].target_term, base[i].target_term);
        }
    }
}

TEST(Fusion, ArmBreaksProductTie) {
    const D1R1 f;
    const auto ranked = mine_fixture(f);
    // the two 0.1 rows share tm x sem = 0.09; arm 0.4 beats 0.2
    EXPECT_EQ(ranked[5].target_term, "touch panel");
    EXPECT_GT(ranked[5].evidence.arm, ranked[6].evidence.arm);
}

TEST(Fusion, ConfNeverIncreasesDownTheList) {
    const D1R1 f;
    const auto ranked = mine_fixture(f);
    for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_LE(ranked[i].conf, ranked[i - 1].conf);
}

TEST(Fusion, TierMonotonicity) {
    // adding evidence can only raise conf under the default scheme
    const ConfidenceScheme scheme;
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 2000; ++i) {
        CandidateFact c;
        c.evidence.tm = u(gen);
        c.evidence.sem = {u(gen), u(gen)};
        c.evidence.arm = u(gen);
        c.ds_source = 3 * u(gen);
        c.ds_target = 3 * u(gen);
        CandidateFact more = c;
        more.evidence.tm = std::min(1.0, c.evidence.tm + u(gen) * 0.3);
        more.evidence.sem.hw = std::min(1.0, c.evidence.sem.hw + u(gen) * 0.3);
        more.evidence.arm = std::min(1.0, c.evidence.arm + u(gen) * 0.3);
        more.evidence.syn = SynEvidence{};
        EXPECT_GE(scheme.confidence(more), scheme.confidence(c));
    }
}

TEST(Accept, Policies) {
    const D1R1 f;
    const auto ranked = mine_fixture(f);
    const auto top1 = accept(ranked, AcceptPolicy::parse("top:1"));
    ASSERT_EQ(top1.size(), 1u);
    EXPECT_EQ(top1[0].source, "start button");
    EXPECT_EQ(top1[0].target, "clinician");
    EXPECT_EQ(top1[0].relation, "press of (Reverse)");
    EXPECT_EQ(top1[0].status, FactStatus::Suggested);
    EXPECT_EQ(top1[0].provenance.link_id, "L1");
    EXPECT_DOUBLE_EQ(top1[0].provenance.conf, 0.9);
    EXPECT_EQ(accept(ranked, AcceptPolicy::parse("conf:0.45")).size(), 4u);
    EXPECT_TRUE(accept(ranked, AcceptPolicy::parse("top:0")).empty());
    const auto all = accept(ranked, AcceptPolicy::parse("top:100"));
    ASSERT_EQ(all.size(), 7u);
    EXPECT_EQ(all[1].relation, kAssociatedWith);
}

TEST(Accept, BadPolicies) {
    for (const char* s : {"top", "top:-1", "top:x", "conf:", "best:3", "top:3x"})
        EXPECT_THROW(AcceptPolicy::parse(s), ValidationError) << s;
}

TEST(Scheme, JsonRoundTripAndCustomTiers) {
    const ConfidenceScheme def;
    EXPECT_EQ(ConfidenceScheme::from_json(def.to_json()).to_json(), def.to_json());

    const auto custom = ConfidenceScheme::from_json(nlohmann::json::parse(R"({
        "thresholds": {"tm": 0.1, "sem": 0.2},
        "sem_channel": "hw",
        "tiers": [{"name": "labeled", "conf": 0.8, "requires": ["syn"]}, {"name": "rest", "conf": 0.2, "requires": []}]
    })"));
    const D1R1 f;
    const auto ranked = mine_fixture(f, custom);
    ASSERT_FALSE(ranked.empty());
    EXPECT_DOUBLE_EQ(ranked[0].conf, 0.8);
    EXPECT_DOUBLE_EQ(ranked[1].conf, 0.2);
}

TEST(Scheme, Validation) {
    EXPECT_THROW(ConfidenceScheme::from_json({{"tiers", nlohmann::json::array()}}), ValidationError);
    EXPECT_THROW(ConfidenceScheme::from_json(nlohmann::json::parse(
                     R"({"tiers": [{"conf": 0.5, "requires": []}, {"conf": 0.5, "requires": []}]})")),
                 ValidationError);
    EXPECT_THROW(ConfidenceScheme::from_json(nlohmann::json::parse(R"({"tiers": [{"conf": 0.5, "requires": ["magic"]}]})")),
                 ValidationError);
    EXPECT_THROW(ConfidenceScheme::from_json({{"sem_channel", "best"}}), ValidationError);
    EXPECT_THROW(ConfidenceScheme::from_json(nlohmann::json::parse(R"({"tiers": [{"conf": 1.5}]})")), ValidationError);
}

TEST(CandidateJson, CarriesFactId) {
    const D1R1 f;
    const auto ranked = mine_fixture(f);
    const auto j = to_json(ranked[0]);
    EXPECT_EQ(j["fact_id"], fact_id("L1", "start button", "clinician"));
    EXPECT_EQ(j["relation"], "press of (Reverse)");
    EXPECT_EQ(j["reversed"], true);
    EXPECT_TRUE(to_json(ranked[1])["relation"].is_null());
}
