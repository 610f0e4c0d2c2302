#pragma once

#include "tracefacts/corpus.hpp"
#include "tracefacts/project.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tracefacts {

struct Transaction {
    std::string link_id;
    std::set<std::string> source_items;
    std::set<std::string> target_items;
};

struct ArmScore {
    std::string source_term;
    std::string target_term;
    std::size_t co_count = 0;
    std::size_t src_count = 0;
    std::size_t tgt_count = 0;
    double cosine = 0.0;
};

/// One transaction per trace link, holding the domain terms of each side.
inline std::vector<Transaction> build_transactions(const Project& project, const CorpusStats& corpus) {
    std::vector<Transaction> out;
    out.reserve(project.links().size());
    for (const auto& link : project.links()) {
        Transaction t{link.id, {}, {}};
        for (const auto& term : corpus.domain_terms_in(project.artifact(link.source_id))) t.source_items.insert(term.text);
        for (const auto& term : corpus.domain_terms_in(project.artifact(link.target_id))) t.target_items.insert(term.text);
        out.push_back(std::move(t));
    }
    return out;
}

/// Size-2 itemsets across link sides, scored by the cosine measure.
class ArmIndex {
public:
    explicit ArmIndex(const std::vector<Transaction>& transactions, std::size_t min_cooccur = 1) : min_cooccur_(min_cooccur) {
        for (const auto& t : transactions) {
            for (const auto& s : t.source_items) ++src_[s];
            for (const auto& g : t.target_items) ++tgt_[g];
            for (const auto& s : t.source_items)
                for (const auto& g : t.target_items) ++co_[{s, g}];
        }
    }

    std::size_t min_cooccur() const { return min_cooccur_; }

    ArmScore score(const std::string& source_term, const std::string& target_term) const {
        ArmScore r{source_term, target_term, lookup(co_, {source_term, target_term}), lookup(src_, source_term),
                   lookup(tgt_, target_term), 0.0};
        r.cosine = cosine(r.co_count, r.src_count, r.tgt_count);
        return r;
    }

    /// Ranked by cosine, then co-occurrence count, then term text.
    std::vector<ArmScore> top_pairs(std::size_t n) const {
        std::vector<ArmScore> all;
        if (n == 0) return all;
        all.reserve(co_.size());
        for (const auto& [pair, c] : co_) {
            ArmScore r{pair.first, pair.second, c, src_.at(pair.first), tgt_.at(pair.second), 0.0};
            r.cosine = cosine(r.co_count, r.src_count, r.tgt_count);
            all.push_back(std::move(r));
        }
        std::sort(all.begin(), all.end(), [](const ArmScore& a, const ArmScore& b) {
            if (a.cosine != b.cosine) return a.cosine > b.cosine;
            if (a.co_count != b.co_count) return a.co_count > b.co_count;
            return std::tie(a.source_term, a.target_term) < std::tie(b.source_term, b.target_term);
        });
        if (all.size() > n) all.resize(n);
        return all;
    }

private:
    template <class M>
    static std::size_t lookup(const M& m, const typename M::key_type& k) {
        auto it = m.find(k);
        return it == m.end() ? 0 : it->second;
    }

    double cosine(std::size_t co, std::size_t src, std::size_t tgt) const {
        if (co == 0 || co < min_cooccur_) return 0.0;
        // co == src == tgt must give exactly 1
        if (co == src && co == tgt) return 1.0;
        return static_cast<double>(co) / std::sqrt(static_cast<double>(src) * static_cast<double>(tgt));
    }

    std::size_t min_cooccur_;
    std::map<std::pair<std::string, std::string>, std::size_t> co_;
    std::map<std::string, std::size_t> src_;
    std::map<std::string, std::size_t> tgt_;
};

inline nlohmann::json to_json(const ArmScore& s) {
    return {{"source", s.source_term},
            {"target", s.target_term},
            {"co_count", s.co_count},
            {"src_count", s.src_count},
            {"tgt_count", s.tgt_count},
            {"cosine", s.cosine}};
}

} // namespace tracefacts
