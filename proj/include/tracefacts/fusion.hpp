#pragma once

#include "tracefacts/error.hpp"
#include "tracefacts/fact.hpp"
#include "tracefacts/lexsyn.hpp"
#include "tracefacts/project.hpp"
#include "tracefacts/semrel.hpp"

#include <json.hpp>

#include <algorithm>
#include <concepts>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace tracefacts {

struct EvidenceVector {
    std::optional<SynEvidence> syn;
    SemScore sem;
    double arm = 0.0;
    double tm = 0.0;
};

/// Anything that can supply the four evidence channels plus domain specificity.
template <class E>
concept EvidenceSource = requires(const E& e, const TraceLink& link, const std::string& a, const std::string& b) {
    { e.syn(link, a, b) } -> std::convertible_to<std::optional<SynEvidence>>;
    { e.sem(a, b) } -> std::convertible_to<SemScore>;
    { e.arm(a, b) } -> std::convertible_to<double>;
    { e.tm(a, b) } -> std::convertible_to<double>;
    { e.ds(a) } -> std::convertible_to<double>;
};

struct CandidateFact {
    std::string link_id;
    std::string source_term;
    std::string target_term;
    EvidenceVector evidence;
    double ds_source = 0.0;
    double ds_target = 0.0;
    double conf = 0.0;
    std::size_t rank = 0;

    bool has_label() const { return evidence.syn.has_value(); }
    std::optional<std::string> relation_label() const {
        if (!evidence.syn) return std::nullopt;
        return evidence.syn->display_relation();
    }
};

enum class SemChannel { Max, HeadWord, AllWords };

enum class TierCondition { Syn, Tm, TmHi, Sem, SemHi, Arm, Ds };

inline std::string_view to_string(TierCondition c) {
    switch (c) {
    case TierCondition::Syn: return "syn";
    case TierCondition::Tm: return "tm";
    case TierCondition::TmHi: return "tm_hi";
    case TierCondition::Sem: return "sem";
    case TierCondition::SemHi: return "sem_hi";
    case TierCondition::Arm: return "arm";
    case TierCondition::Ds: return "ds";
    }
    return "syn";
}

inline TierCondition tier_condition_from(const std::string& s) {
    for (auto c : {TierCondition::Syn, TierCondition::Tm, TierCondition::TmHi, TierCondition::Sem, TierCondition::SemHi,
                   TierCondition::Arm, TierCondition::Ds})
        if (to_string(c) == s) return c;
    throw ValidationError("unknown tier condition " + s);
}

struct Tier {
    std::string name;
    double conf = 0.0;
    std::vector<TierCondition> requires_all;  // empty: matches every surviving candidate
};

/// Thresholds plus an ordered tier table; the first tier whose conditions all hold assigns conf.
struct ConfidenceScheme {
    double theta_tm = 0.1;
    double theta_tm_hi = 0.5;
    double theta_sem = 0.2;
    double theta_sem_hi = 0.5;
    double theta_arm = 0.5;
    double theta_ds = 1.5;
    SemChannel sem_channel = SemChannel::Max;
    std::vector<Tier> tiers = {
        {"T1", 0.9, {TierCondition::Syn, TierCondition::Tm, TierCondition::Sem}},
        {"T2", 0.6, {TierCondition::Arm, TierCondition::TmHi, TierCondition::SemHi}},
        {"T3", 0.5, {TierCondition::TmHi, TierCondition::SemHi, TierCondition::Ds}},
        {"T4", 0.4, {TierCondition::TmHi, TierCondition::SemHi}},
        {"T5", 0.1, {}},
    };

    void validate() const {
        if (tiers.empty()) throw ValidationError("confidence scheme has no tiers");
        for (std::size_t i = 0; i < tiers.size(); ++i) {
            if (tiers[i].conf < 0.0 || tiers[i].conf > 1.0) throw ValidationError("tier " + tiers[i].name + " conf outside [0,1]");
            if (i > 0 && !(tiers[i].conf < tiers[i - 1].conf))
                throw ValidationError("tier conf values must be strictly decreasing (at " + tiers[i].name + ")");
        }
    }

    double sem_value(const SemScore& s) const {
        switch (sem_channel) {
        case SemChannel::HeadWord: return s.hw;
        case SemChannel::AllWords: return s.aw;
        case SemChannel::Max: break;
        }
        return s.max();
    }

    bool holds(TierCondition c, const CandidateFact& cf) const {
        const auto& e = cf.evidence;
        switch (c) {
        case TierCondition::Syn: return e.syn.has_value();
        case TierCondition::Tm: return e.tm >= theta_tm;
        case TierCondition::TmHi: return e.tm >= theta_tm_hi;
        case TierCondition::Sem: return sem_value(e.sem) >= theta_sem;
        case TierCondition::SemHi: return sem_value(e.sem) >= theta_sem_hi;
        case TierCondition::Arm: return e.arm >= theta_arm;
        case TierCondition::Ds: return cf.ds_source >= theta_ds && cf.ds_target >= theta_ds;
        }
        return false;
    }

    /// Conf of the first matching tier, or 0 when none matches.
    double confidence(const CandidateFact& cf) const {
        for (const auto& t : tiers)
            if (std::all_of(t.requires_all.begin(), t.requires_all.end(), [&](TierCondition c) { return holds(c, cf); }))
                return t.conf;
        return 0.0;
    }

    nlohmann::json to_json() const {
        nlohmann::json tj = nlohmann::json::array();
        for (const auto& t : tiers) {
            std::vector<std::string> conds;
            for (auto c : t.requires_all) conds.emplace_back(to_string(c));
            tj.push_back({{"name", t.name}, {"conf", t.conf}, {"requires", conds}});
        }
        const char* ch = sem_channel == SemChannel::Max ? "max" : sem_channel == SemChannel::HeadWord ? "hw" : "aw";
        return {{"thresholds",
                 {{"tm", theta_tm}, {"tm_hi", theta_tm_hi}, {"sem", theta_sem}, {"sem_hi", theta_sem_hi},
                  {"arm", theta_arm}, {"ds", theta_ds}}},
                {"sem_channel", ch},
                {"tiers", tj}};
    }

    static ConfidenceScheme from_json(const nlohmann::json& j) {
        ConfidenceScheme s;
        try {
            if (auto t = j.find("thresholds"); t != j.end()) {
                s.theta_tm = t->value("tm", s.theta_tm);
                s.theta_tm_hi = t->value("tm_hi", s.theta_tm_hi);
                s.theta_sem = t->value("sem", s.theta_sem);
                s.theta_sem_hi = t->value("sem_hi", s.theta_sem_hi);
                s.theta_arm = t->value("arm", s.theta_arm);
                s.theta_ds = t->value("ds", s.theta_ds);
            }
            const std::string ch = j.value("sem_channel", "max");
            if (ch == "max") s.sem_channel = SemChannel::Max;
            else if (ch == "hw") s.sem_channel = SemChannel::HeadWord;
            else if (ch == "aw") s.sem_channel = SemChannel::AllWords;
            else throw ValidationError("unknown sem_channel " + ch);
            if (auto t = j.find("tiers"); t != j.end()) {
                s.tiers.clear();
                for (const auto& tj : *t) {
                    Tier tier;
                    tier.name = tj.value("name", "T" + std::to_string(s.tiers.size() + 1));
                    tier.conf = tj.at("conf").get<double>();
                    for (const auto& c : tj.value("requires", std::vector<std::string>{}))
                        tier.requires_all.push_back(tier_condition_from(c));
                    s.tiers.push_back(std::move(tier));
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("malformed confidence scheme: ") + e.what());
        }
        s.validate();
        return s;
    }

    static ConfidenceScheme load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IoError(path.string(), "cannot open scheme file");
        try {
            return from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path.string(), 1, e.what());
        }
    }
};

/// One candidate per distinct (source term, target term) pair with s != t.
template <EvidenceSource E>
std::vector<CandidateFact> generate_candidates(const TraceLink& link, const std::vector<std::string>& source_terms,
                                               const std::vector<std::string>& target_terms, const E& ev) {
    std::vector<CandidateFact> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& s : source_terms)
        for (const auto& t : target_terms) {
            if (s == t || !seen.emplace(s, t).second) continue;
            CandidateFact cf;
            cf.link_id = link.id;
            cf.source_term = s;
            cf.target_term = t;
            cf.evidence.syn = ev.syn(link, s, t);
            cf.evidence.sem = ev.sem(s, t);
            cf.evidence.arm = ev.arm(s, t);
            cf.evidence.tm = ev.tm(s, t);
            cf.ds_source = ev.ds(s);
            cf.ds_target = ev.ds(t);
            out.push_back(std::move(cf));
        }
    return out;
}

/// Drops candidates lacking topic-model or semantic support.
inline std::vector<CandidateFact> filter_candidates(std::vector<CandidateFact> candidates, const ConfidenceScheme& scheme) {
    std::erase_if(candidates, [&](const CandidateFact& c) {
        return !(c.evidence.tm >= scheme.theta_tm && c.evidence.sem.max() >= scheme.theta_sem);
    });
    return candidates;
}

/// Total order: conf, tm x sem, arm, then (source, target).
inline bool ranks_before(const CandidateFact& a, const CandidateFact& b, const ConfidenceScheme& scheme) {
    if (a.conf != b.conf) return a.conf > b.conf;
    const double pa = a.evidence.tm * scheme.sem_value(a.evidence.sem);
    const double pb = b.evidence.tm * scheme.sem_value(b.evidence.sem);
    if (pa != pb) return pa > pb;
    if (a.evidence.arm != b.evidence.arm) return a.evidence.arm > b.evidence.arm;
    return std::tie(a.source_term, a.target_term) < std::tie(b.source_term, b.target_term);
}

inline std::vector<CandidateFact> score_and_rank(std::vector<CandidateFact> candidates, const ConfidenceScheme& scheme) {
    for (auto& c : candidates) c.conf = scheme.confidence(c);
    std::sort(candidates.begin(), candidates.end(),
              [&](const CandidateFact& a, const CandidateFact& b) { return ranks_before(a, b, scheme); });
    for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].rank = i + 1;
    return candidates;
}

template <EvidenceSource E>
std::vector<CandidateFact> mine_link(const TraceLink& link, const std::vector<std::string>& source_terms,
                                     const std::vector<std::string>& target_terms, const E& ev,
                                     const ConfidenceScheme& scheme) {
    return score_and_rank(filter_candidates(generate_candidates(link, source_terms, target_terms, ev), scheme), scheme);
}

struct AcceptPolicy {
    enum class Kind { TopN, MinConf } kind = Kind::TopN;
    std::size_t n = 10;
    double min_conf = 0.5;

    /// "top:N" or "conf:x".
    static AcceptPolicy parse(const std::string& spec) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) throw ValidationError("accept policy must be top:N or conf:x, got " + spec);
        const std::string kind = spec.substr(0, colon), value = spec.substr(colon + 1);
        AcceptPolicy p;
        try {
            std::size_t used = 0;
            if (kind == "top") {
                const long long n = std::stoll(value, &used);
                if (n < 0) throw ValidationError("top:N needs N >= 0");
                p.kind = Kind::TopN;
                p.n = static_cast<std::size_t>(n);
            } else if (kind == "conf") {
                p.kind = Kind::MinConf;
                p.min_conf = std::stod(value, &used);
            } else {
                throw ValidationError("unknown accept policy " + kind);
            }
            if (used != value.size()) throw ValidationError("trailing characters in accept policy " + spec);
        } catch (const std::logic_error&) {
            throw ValidationError("bad number in accept policy " + spec);
        }
        return p;
    }
};

inline nlohmann::json evidence_summary(const CandidateFact& c) {
    nlohmann::json j{{"tm", c.evidence.tm},
                     {"sem", {{"hw", c.evidence.sem.hw}, {"aw", c.evidence.sem.aw}}},
                     {"arm", c.evidence.arm},
                     {"syn", nullptr}};
    if (c.evidence.syn) j["syn"] = to_json(*c.evidence.syn);
    return j;
}

/// Suggested fact for a candidate; unlabeled candidates become "associated-with".
inline Fact to_fact(const CandidateFact& c) {
    Fact f;
    f.id = fact_id(c.link_id, c.source_term, c.target_term);
    f.source = c.source_term;
    f.target = c.target_term;
    f.relation = c.relation_label().value_or(kAssociatedWith);
    f.status = FactStatus::Suggested;
    f.provenance.link_id = c.link_id;
    f.provenance.conf = c.conf;
    f.provenance.evidence = evidence_summary(c);
    return f;
}

/// Selects the top-N prefix or all candidates at or above a conf threshold.
inline std::vector<Fact> accept(const std::vector<CandidateFact>& ranked, const AcceptPolicy& policy) {
    std::vector<Fact> out;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (policy.kind == AcceptPolicy::Kind::TopN && i >= policy.n) break;
        if (policy.kind == AcceptPolicy::Kind::MinConf && ranked[i].conf < policy.min_conf) continue;
        out.push_back(to_fact(ranked[i]));
    }
    return out;
}

inline nlohmann::json to_json(const CandidateFact& c) {
    nlohmann::json j{{"link_id", c.link_id},
                     {"rank", c.rank},
                     {"source", c.source_term},
                     {"target", c.target_term},
                     {"relation", nullptr},
                     {"reversed", c.evidence.syn ? c.evidence.syn->reversed : false},
                     {"conf", c.conf},
                     {"fact_id", fact_id(c.link_id, c.source_term, c.target_term)},
                     {"ds_source", c.ds_source},
                     {"ds_target", c.ds_target},
                     {"evidence", evidence_summary(c)}};
    if (auto r = c.relation_label()) j["relation"] = *r;
    return j;
}

} // namespace tracefacts
