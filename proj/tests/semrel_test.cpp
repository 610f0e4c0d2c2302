#include "tracefacts/semrel.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

using namespace tracefacts;
using testsupport::TempDir;

namespace {

// Counts fed to the toy hierarchy. "unit" has two senses (device, container),
// so its 2 occurrences add 1 to each.
const TermCounts kNounCounts{{"pump", 4}, {"reservoir", 2}, {"device", 1}, {"container", 1}, {"unit", 2},
                             {"abstraction", 2}};

// Propagated counts worked out by hand:
//   pump 4, reservoir 2, device 1+1+4 = 6, container 1+1+2 = 4,
//   object 6+4 = 10, abstraction 2, entity 12 (the only root).
double ic_hand(double count) { return -std::log(count / 12.0); }

double lin_hand(double lcs, double a, double b) { return 2.0 * ic_hand(lcs) / (ic_hand(a) + ic_hand(b)); }

struct Toy : ::testing::Test {
    WordNet wn = WordNet::load(testsupport::toy_wordnet());
    InformationContent ic{wn, kNounCounts, {{"pump", 3}, {"store", 1}}};
};

} // namespace

TEST_F(Toy, LoadsSevenNounSynsets) {
    EXPECT_EQ(wn.synsets(WnPos::Noun).size(), 7u);
    EXPECT_EQ(wn.senses("unit", WnPos::Noun).size(), 2u);
    EXPECT_EQ(wn.senses("reservoirs", WnPos::Noun).size(), 1u);
    EXPECT_EQ(wn.senses("pumps", WnPos::Noun).size(), 1u);
    EXPECT_EQ(wn.senses("pumped", WnPos::Verb).size(), 1u);
    EXPECT_TRUE(wn.senses("chair", WnPos::Noun).empty());
}

TEST_F(Toy, InformationContentMatchesHandCounts) {
    auto idx = [&](const std::string& w) { return wn.senses(w, WnPos::Noun).front(); };
    EXPECT_NEAR(ic.ic(idx("entity"), WnPos::Noun), 0.0, 1e-12);
    EXPECT_NEAR(ic.ic(idx("object"), WnPos::Noun), ic_hand(10), 1e-12);
    EXPECT_NEAR(ic.ic(idx("abstraction"), WnPos::Noun), ic_hand(2), 1e-12);
    EXPECT_NEAR(ic.ic(idx("device"), WnPos::Noun), ic_hand(6), 1e-12);
    EXPECT_NEAR(ic.ic(idx("container"), WnPos::Noun), ic_hand(4), 1e-12);
    EXPECT_NEAR(ic.ic(idx("pump"), WnPos::Noun), ic_hand(4), 1e-12);
    EXPECT_NEAR(ic.ic(idx("reservoir"), WnPos::Noun), ic_hand(2), 1e-12);
}

TEST_F(Toy, LinValuesMatchHandComputation) {
    EXPECT_NEAR(ic.lin("pump", "reservoir", WnPos::Noun), lin_hand(10, 4, 2), 1e-9);
    EXPECT_NEAR(ic.lin("pump", "device", WnPos::Noun), lin_hand(6, 4, 6), 1e-9);
    EXPECT_NEAR(ic.lin("device", "container", WnPos::Noun), lin_hand(10, 6, 4), 1e-9);
    EXPECT_NEAR(ic.lin("pump", "pump", WnPos::Noun), 1.0, 1e-9);
    EXPECT_NEAR(ic.lin("pump", "abstraction", WnPos::Noun), 0.0, 1e-12);
    // best sense of "unit" against reservoir is the container sense
    EXPECT_NEAR(ic.lin("unit", "reservoir", WnPos::Noun), lin_hand(4, 4, 2), 1e-9);
    EXPECT_EQ(ic.lin("pump", "chair", WnPos::Noun), 0.0);
}

TEST_F(Toy, UnseenSubtreesCountOnce) {
    // abstraction is never observed: it counts 1, so entity = 8 + 5 + 1
    const InformationContent sparse(wn, {{"pump", 8}, {"reservoir", 5}}, {});
    auto ic14 = [](double c) { return -std::log(c / 14.0); };
    const auto obj = wn.senses("object", WnPos::Noun).front();
    EXPECT_NEAR(sparse.ic(obj, WnPos::Noun), ic14(13), 1e-12);
    EXPECT_NEAR(sparse.lin("pump", "reservoir", WnPos::Noun), 2 * ic14(13) / (ic14(8) + ic14(5)), 1e-9);
}

TEST_F(Toy, VerbHierarchyUsesVirtualRoot) {
    // move and store are separate roots; their only common ancestor is the virtual root
    EXPECT_EQ(ic.lin("pump", "store", WnPos::Verb), 0.0);
    EXPECT_GT(ic.lin("pump", "move", WnPos::Verb), 0.0);
}

TEST_F(Toy, SemScoreHeadAndAllWords) {
    const SemScore s = sem_score(ic, "infusion pump", "drug reservoir");
    EXPECT_NEAR(s.hw, lin_hand(10, 4, 2), 1e-9);
    // only pump/reservoir are known: each side averages over two content words
    const double pr = lin_hand(10, 4, 2);
    EXPECT_NEAR(s.aw, 0.5 * (pr / 2 + pr / 2), 1e-9);
}

TEST_F(Toy, SemScoreSymmetryAndRangeProperty) {
    const std::vector<std::string> words = {"pump", "reservoir", "device", "container", "unit", "object",
                                            "abstraction", "entity", "move", "store", "the", "valve", "of"};
    std::mt19937 gen(7);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(1, 3);
    auto term = [&] {
        std::string t;
        for (std::size_t i = len(gen); i > 0; --i) t += (t.empty() ? "" : " ") + words[pick(gen)];
        return t;
    };
    for (int i = 0; i < 10000; ++i) {
        const auto a = term(), b = term();
        const SemScore ab = sem_score(ic, a, b), ba = sem_score(ic, b, a);
        ASSERT_DOUBLE_EQ(ab.hw, ba.hw) << a << " / " << b;
        ASSERT_NEAR(ab.aw, ba.aw, 1e-12) << a << " / " << b;
        ASSERT_GE(ab.hw, 0.0);
        ASSERT_LE(ab.hw, 1.0);
        ASSERT_GE(ab.aw, 0.0);
        ASSERT_LE(ab.aw, 1.0);
    }
}

TEST(WordNetLoad, MissingFileIsNamed) {
    TempDir dir;
    for (const char* f : {"data.noun", "index.noun", "data.verb", "index.verb", "noun.exc"})
        std::filesystem::copy_file(testsupport::toy_wordnet() / f, dir / f);
    try {
        WordNet::load(dir.path());
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("verb.exc"), std::string::npos);
    }
}

TEST(WordNetLoad, RealWordNetWhenAvailable) {
    const char* dir = std::getenv("TRACEFACTS_WORDNET_DIR");
    if (!dir || !*dir) GTEST_SKIP() << "TRACEFACTS_WORDNET_DIR not set";
    const WordNet wn = WordNet::load(dir);
    const InformationContent ic(wn, {{"pump", 5}, {"device", 3}, {"hospital", 2}}, {});
    // ordinal checks only: absolute values depend on WordNet version and corpus
    EXPECT_GT(ic.lin("pump", "device", WnPos::Noun), ic.lin("pump", "hospital", WnPos::Noun));
    EXPECT_NEAR(ic.lin("pump", "pump", WnPos::Noun), 1.0, 1e-9);
}
