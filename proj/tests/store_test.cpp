#include "tracefacts/store.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tracefacts;
using testsupport::TempDir;

namespace {

Clock fixed_clock() {
    auto n = std::make_shared<int>(0);
    return [n] { return "2024-01-01T00:00:" + std::string(*n < 10 ? "0" : "") + std::to_string((*n)++ % 60) + "Z"; };
}

Fact suggestion(const std::string& link, const std::string& s, const std::string& t, const std::string& rel = kAssociatedWith) {
    Fact f;
    f.id = fact_id(link, s, t);
    f.source = s;
    f.target = t;
    f.relation = rel;
    f.provenance.link_id = link;
    f.provenance.conf = 0.5;
    return f;
}

Decision decision(DecisionAction a, std::optional<std::string> rel = std::nullopt) {
    Decision d;
    d.action = a;
    d.relation = std::move(rel);
    d.editor = "analyst";
    return d;
}

std::vector<nlohmann::json> events_of(const FactStore& s) {
    std::vector<nlohmann::json> out;
    for (const auto& line : s.audit_log()) out.push_back(nlohmann::json::parse(line));
    return out;
}

} // namespace

TEST(FactId, StableAndDistinct) {
    EXPECT_EQ(fact_id("L1", "start button", "clinician"), fact_id("L1", "start button", "clinician"));
    EXPECT_NE(fact_id("L1", "start button", "clinician"), fact_id("L1", "clinician", "start button"));
    EXPECT_NE(fact_id("L1", "ab", "c"), fact_id("L1", "a", "bc"));
    EXPECT_EQ(fact_id("L1", "a", "b").size(), 17u);
}

TEST(Store, AcceptWithEditedRelation) {
    FactStore s(fixed_clock());
    const auto f = s.suggest(suggestion("L1", "start button", "clinician", "press of (Reverse)"));
    ASSERT_TRUE(f);
    const auto out = s.record_decision(f->id, decision(DecisionAction::Accept, "is pressed by"));
    EXPECT_EQ(out.status, FactStatus::Accepted);
    EXPECT_EQ(out.relation, "is pressed by");
    EXPECT_EQ(out.provenance.editor, "analyst");
    ASSERT_EQ(s.ontology().size(), 1u);
    EXPECT_EQ(s.entity_index().at("clinician"), std::set<std::string>{f->id});
}

TEST(Store, RejectedPairNeverResuggested) {
    FactStore s(fixed_clock());
    const auto f = s.suggest(suggestion("L1", "pca pump", "speaker"));
    s.record_decision(f->id, decision(DecisionAction::Reject));
    EXPECT_TRUE(s.ontology().empty());
    EXPECT_FALSE(s.suggest(suggestion("L2", "pca pump", "speaker")));
    EXPECT_FALSE(s.suggest(suggestion("L3", "speaker", "pca pump")));
    EXPECT_TRUE(s.is_rejected_pair("speaker", "pca pump"));
}

TEST(Store, ModifyValidation) {
    FactStore s(fixed_clock());
    const auto f = s.suggest(suggestion("L1", "pump", "valve"));
    EXPECT_THROW(s.record_decision(f->id, decision(DecisionAction::Modify, "")), ValidationError);
    EXPECT_THROW(s.record_decision(f->id, decision(DecisionAction::Modify)), ValidationError);
    Decision loop = decision(DecisionAction::Modify);
    loop.target = "pump";
    EXPECT_THROW(s.record_decision(f->id, loop), ValidationError);
    EXPECT_EQ(s.get(f->id).status, FactStatus::Suggested);
    EXPECT_THROW(s.record_decision("fmissing", decision(DecisionAction::Accept)), NotFoundError);
}

TEST(Store, DuplicateAcceptedTripleConflicts) {
    FactStore s(fixed_clock());
    const auto a = s.suggest(suggestion("L1", "pump", "valve", "has-part"));
    const auto b = s.suggest(suggestion("L2", "pump", "valve", "has-part"));
    s.record_decision(a->id, decision(DecisionAction::Accept));
    EXPECT_THROW(s.record_decision(b->id, decision(DecisionAction::Accept)), ConflictError);
    EXPECT_NO_THROW(s.record_decision(b->id, decision(DecisionAction::Modify, "drives")));
}

TEST(Store, IdenticalDecisionIsNoOp) {
    FactStore s(fixed_clock());
    const auto f = s.suggest(suggestion("L1", "pump", "valve"));
    s.record_decision(f->id, decision(DecisionAction::Accept, "drives"));
    const auto before = s.audit_log().size();
    const Fact again = s.record_decision(f->id, decision(DecisionAction::Accept, "drives"));
    EXPECT_EQ(s.audit_log().size(), before);
    EXPECT_EQ(again, s.get(f->id));
}

TEST(Store, ReplayReproducesStateProperty) {
    std::mt19937 gen(21);
    const std::vector<std::string> terms = {"pump", "valve", "alarm", "clinician", "battery"};
    for (int round = 0; round < 100; ++round) {
        FactStore s(fixed_clock());
        std::vector<std::string> ids;
        for (int step = 0; step < 30; ++step) {
            if (ids.empty() || gen() % 3 == 0) {
                const auto& a = terms[gen() % terms.size()];
                const auto& b = terms[gen() % terms.size()];
                if (a == b) continue;
                if (auto f = s.suggest(suggestion("L" + std::to_string(gen() % 3), a, b))) ids.push_back(f->id);
                continue;
            }
            const auto action = static_cast<DecisionAction>(gen() % 3);
            const std::vector<std::string> rels = {"drives", "has-part", "is-part-of"};
            try {
                s.record_decision(ids[gen() % ids.size()], decision(action, rels[gen() % rels.size()]));
            } catch (const Error&) {
            }
        }
        const auto rebuilt = FactStore::replay(events_of(s));
        ASSERT_EQ(rebuilt.to_json(), s.to_json()) << "round " << round;
    }
}

TEST(Store, PersistsAcrossOpen) {
    TempDir dir;
    std::string id;
    {
        auto s = FactStore::open(dir.path(), fixed_clock());
        id = s.suggest(suggestion("L1", "pump", "valve"))->id;
        s.record_decision(id, decision(DecisionAction::Accept, "has-part"));
    }
    EXPECT_TRUE(std::filesystem::exists(dir / "ontology.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "audit.jsonl"));
    const auto reopened = FactStore::open(dir.path(), fixed_clock());
    EXPECT_EQ(reopened.get(id).status, FactStatus::Accepted);
    EXPECT_EQ(reopened.audit_log().size(), 2u);
}

TEST(Store, CorruptAuditLogReportsLine) {
    TempDir dir;
    testsupport::write_file(dir / "audit.jsonl", "\n{broken\n");
    try {
        FactStore::open(dir.path());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Export, JsonRoundTrip) {
    FactStore s(fixed_clock());
    for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{{"pump", "valve"}, {"alarm", "speaker"}}) {
        const auto f = s.suggest(suggestion("L1", a, b));
        s.record_decision(f->id, decision(DecisionAction::Accept, "has-part"));
    }
    const auto exported = export_json(s.ontology());
    EXPECT_EQ(import_json(nlohmann::json::parse(exported.dump())), s.ontology());
    EXPECT_THROW(import_json(nlohmann::json::object()), ValidationError);
}

TEST(Export, TurtleForExceptionHierarchy) {
    FactStore s(fixed_clock());
    const auto a = s.suggest(suggestion("L1", "fluid exception", "exception"));
    const auto b = s.suggest(suggestion("L1", "air-in-line embolism", "fluid exception"));
    s.record_decision(a->id, decision(DecisionAction::Accept, "is-subclass-of"));
    s.record_decision(b->id, decision(DecisionAction::Accept, "is-subclass-of"));
    const std::string ttl = export_turtle(s.ontology());
    EXPECT_NE(ttl.find("@prefix tf: <http://example.org/tracefacts#> ."), std::string::npos);
    EXPECT_NE(ttl.find("tf:fluid_exception tf:is-subclass-of tf:exception ."), std::string::npos);
    EXPECT_NE(ttl.find("tf:air-in-line_embolism tf:is-subclass-of tf:fluid_exception ."), std::string::npos);
    std::size_t triples = 0;
    for (std::size_t p = 0; (p = ttl.find(" .\n", p)) != std::string::npos; ++p) ++triples;
    EXPECT_EQ(triples, 3u);  // prefix line plus two facts
}

TEST(Export, EmptyOntology) {
    EXPECT_EQ(export_json({}), nlohmann::json::array());
    EXPECT_EQ(export_turtle({}), "@prefix tf: <http://example.org/tracefacts#> .\n");
}

TEST(Export, TurtleEscapesOddCharacters) {
    EXPECT_EQ(turtle_local_name("press of (Reverse)"), "press_of_%28Reverse%29");
    EXPECT_EQ(turtle_local_name("-x"), "%2Dx");
}
