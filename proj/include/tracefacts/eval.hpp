#pragma once

#include "tracefacts/error.hpp"
#include "tracefacts/fusion.hpp"
#include "tracefacts/project.hpp"
#include "tracefacts/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tracefacts {

struct AnswerFact {
    std::string source;
    std::string target;
    std::optional<std::string> label;
};

struct AnswerSet {
    std::string link_id;
    std::vector<AnswerFact> facts;
};

/// Answer sets from JSON Lines {link_id, facts:[{source,target,label?}]}; terms are normalized.
inline std::vector<AnswerSet> load_answers(const std::filesystem::path& path,
                                           const Analyzer& analyzer = Analyzer::default_instance()) {
    std::vector<AnswerSet> out;
    const std::string file = path.string();
    detail::for_each_jsonl(path, [&](const nlohmann::json& obj, std::size_t lineno) {
        AnswerSet a;
        a.link_id = detail::required_string(obj, "link_id", file, lineno);
        auto facts = obj.find("facts");
        if (facts == obj.end() || !facts->is_array()) throw ParseError(file, lineno, "missing facts array");
        for (const auto& f : *facts) {
            if (!f.is_object()) throw ParseError(file, lineno, "fact must be an object");
            AnswerFact af;
            af.source = normalize_phrase(detail::required_string(f, "source", file, lineno), analyzer);
            af.target = normalize_phrase(detail::required_string(f, "target", file, lineno), analyzer);
            if (auto l = f.find("label"); l != f.end() && l->is_string()) af.label = l->get<std::string>();
            a.facts.push_back(std::move(af));
        }
        out.push_back(std::move(a));
    });
    return out;
}

using TermPair = std::pair<std::string, std::string>;
using RankedLists = std::map<std::string, std::vector<TermPair>>;  // link id -> ranked (source, target)

enum class Averaging { Micro, Macro };

struct HitRatioCurve {
    std::string method;
    std::vector<double> points;  // points[N-1] = hit ratio at top N
    double generation_ceiling = 0.0;
    bool defined = true;  // false when there are no answer facts

    double at(std::size_t n) const {
        if (!defined || points.empty() || n == 0) return 0.0;
        return points[std::min(n, points.size()) - 1];
    }
};

namespace detail {

inline bool same_pair(const TermPair& p, const AnswerFact& a) {
    return (p.first == a.source && p.second == a.target) || (p.first == a.target && p.second == a.source);
}

} // namespace detail

/// Fraction of answer facts found in the top N of their link's list, for N = 1..n_max.
inline HitRatioCurve hit_ratio(const RankedLists& ranked, const std::vector<AnswerSet>& answers, std::size_t n_max = 100,
                               Averaging averaging = Averaging::Micro, std::string method = "heuristic") {
    HitRatioCurve c;
    c.method = std::move(method);
    for (const auto& a : answers)
        if (!ranked.count(a.link_id)) throw NotFoundError("answer set references unknown trace link " + a.link_id);
    // best rank per answer fact (0 = never generated), grouped by link
    std::vector<std::vector<std::size_t>> ranks_by_link;
    std::size_t total = 0;
    for (const auto& a : answers) {
        std::vector<std::size_t> ranks;
        const auto& list = ranked.at(a.link_id);
        for (const auto& f : a.facts) {
            std::size_t r = 0;
            for (std::size_t i = 0; i < list.size(); ++i)
                if (detail::same_pair(list[i], f)) {
                    r = i + 1;
                    break;
                }
            ranks.push_back(r);
        }
        total += ranks.size();
        if (!ranks.empty()) ranks_by_link.push_back(std::move(ranks));
    }
    if (total == 0) {
        c.defined = false;
        return c;
    }
    auto ratio = [&](std::size_t n) {
        if (averaging == Averaging::Micro) {
            std::size_t hits = 0;
            for (const auto& rs : ranks_by_link)
                for (auto r : rs) hits += r != 0 && r <= n;
            return static_cast<double>(hits) / static_cast<double>(total);
        }
        double sum = 0.0;
        for (const auto& rs : ranks_by_link) {
            std::size_t hits = 0;
            for (auto r : rs) hits += r != 0 && r <= n;
            sum += static_cast<double>(hits) / static_cast<double>(rs.size());
        }
        return sum / static_cast<double>(ranks_by_link.size());
    };
    for (std::size_t n = 1; n <= n_max; ++n) c.points.push_back(ratio(n));
    c.generation_ceiling = ratio(static_cast<std::size_t>(-1));
    return c;
}

using CandidateLists = std::map<std::string, std::vector<CandidateFact>>;  // link id -> unfiltered candidates

namespace detail {

inline RankedLists rank_by(const CandidateLists& lists,
                           const std::function<bool(const CandidateFact&, const CandidateFact&)>& better) {
    RankedLists out;
    for (const auto& [link, cands] : lists) {
        auto sorted = cands;
        std::sort(sorted.begin(), sorted.end(), [&](const CandidateFact& a, const CandidateFact& b) {
            if (better(a, b)) return true;
            if (better(b, a)) return false;
            return std::tie(a.source_term, a.target_term) < std::tie(b.source_term, b.target_term);
        });
        auto& v = out[link];
        for (const auto& c : sorted) v.emplace_back(c.source_term, c.target_term);
    }
    return out;
}

} // namespace detail

/// Single-technique curves (SYN, SEM all-words, ARM, TM) and the fused heuristic ranking.
inline std::vector<HitRatioCurve> technique_curves(const CandidateLists& lists, const std::vector<AnswerSet>& answers,
                                                   const ConfidenceScheme& scheme, std::size_t n_max = 100,
                                                   Averaging averaging = Averaging::Micro) {
    std::vector<HitRatioCurve> out;
    out.push_back(hit_ratio(detail::rank_by(lists,
                                            [](const CandidateFact& a, const CandidateFact& b) {
                                                const int sa = a.evidence.syn ? 1 : 0, sb = b.evidence.syn ? 1 : 0;
                                                if (sa != sb) return sa > sb;
                                                return a.evidence.tm > b.evidence.tm;
                                            }),
                            answers, n_max, averaging, "SYN"));
    out.push_back(hit_ratio(detail::rank_by(lists, [](const CandidateFact& a, const CandidateFact& b) {
                                return a.evidence.sem.aw > b.evidence.sem.aw;
                            }),
                            answers, n_max, averaging, "SEM"));
    out.push_back(hit_ratio(detail::rank_by(lists, [](const CandidateFact& a, const CandidateFact& b) {
                                return a.evidence.arm > b.evidence.arm;
                            }),
                            answers, n_max, averaging, "ARM"));
    out.push_back(hit_ratio(detail::rank_by(lists, [](const CandidateFact& a, const CandidateFact& b) {
                                return a.evidence.tm > b.evidence.tm;
                            }),
                            answers, n_max, averaging, "TM"));
    RankedLists fused;
    for (const auto& [link, cands] : lists) {
        auto& v = fused[link];
        for (const auto& c : score_and_rank(filter_candidates(cands, scheme), scheme)) v.emplace_back(c.source_term, c.target_term);
    }
    out.push_back(hit_ratio(fused, answers, n_max, averaging, "heuristic"));
    return out;
}

/// Mean curve over seeds, each seed shuffling every link's unfiltered candidate list.
inline HitRatioCurve random_baseline(const CandidateLists& lists, const std::vector<AnswerSet>& answers,
                                     const std::vector<std::uint64_t>& seeds, std::size_t n_max = 100,
                                     Averaging averaging = Averaging::Micro) {
    HitRatioCurve mean;
    mean.method = "random";
    if (seeds.empty()) throw ValidationError("random baseline needs at least one seed");
    RankedLists base;
    for (const auto& [link, cands] : lists) {
        auto& v = base[link];
        for (const auto& c : cands) v.emplace_back(c.source_term, c.target_term);
    }
    mean.points.assign(n_max, 0.0);
    for (auto seed : seeds) {
        SplitMix64 rng(seed);
        RankedLists shuffled = base;
        for (auto& [link, v] : shuffled) shuffle(v, rng);
        const auto c = hit_ratio(shuffled, answers, n_max, averaging, "random");
        if (!c.defined) {
            mean.defined = false;
            mean.points.clear();
            return mean;
        }
        for (std::size_t i = 0; i < n_max; ++i) mean.points[i] += c.points[i];
        mean.generation_ceiling = c.generation_ceiling;
    }
    for (auto& p : mean.points) p /= static_cast<double>(seeds.size());
    return mean;
}

/// Parses "1..1000" or a comma-separated list of seeds.
inline std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    std::vector<std::uint64_t> out;
    try {
        if (auto dots = spec.find(".."); dots != std::string::npos) {
            const auto lo = std::stoull(spec.substr(0, dots)), hi = std::stoull(spec.substr(dots + 2));
            if (hi < lo) throw ValidationError("empty seed range " + spec);
            for (auto s = lo; s <= hi; ++s) out.push_back(s);
            return out;
        }
        std::size_t start = 0;
        while (start <= spec.size()) {
            const auto comma = spec.find(',', start);
            out.push_back(std::stoull(spec.substr(start, comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    } catch (const std::logic_error&) {
        throw ValidationError("bad seed list " + spec);
    }
    return out;
}

inline void write_curves_csv(const std::vector<HitRatioCurve>& curves, std::ostream& out) {
    out << "method,N,hit_ratio\n";
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.points.size(); ++i) out << c.method << ',' << i + 1 << ',' << c.points[i] << '\n';
}

/// Whitespace-separated columns: N followed by one column per method.
inline void write_curves_dat(const std::vector<HitRatioCurve>& curves, std::ostream& out) {
    out << "# N";
    std::size_t rows = 0;
    for (const auto& c : curves) {
        out << ' ' << c.method;
        rows = std::max(rows, c.points.size());
    }
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        out << i + 1;
        for (const auto& c : curves) out << ' ' << (i < c.points.size() ? c.points[i] : 0.0);
        out << '\n';
    }
}

} // namespace tracefacts
