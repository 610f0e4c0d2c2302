#pragma once

#include "tracefacts/corpus.hpp"
#include "tracefacts/error.hpp"
#include "tracefacts/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tracefacts {

enum class WnPos { Noun, Verb };

struct Synset {
    std::uint64_t offset = 0;
    WnPos pos = WnPos::Noun;
    std::vector<std::string> words;
    std::vector<std::size_t> hypernyms;  // indices into the same POS table
};

/// Noun and verb hierarchies read from WordNet's data.* / index.* / *.exc files.
class WordNet {
public:
    static constexpr const char* kRequiredFiles[] = {"data.noun", "index.noun", "data.verb",
                                                     "index.verb", "noun.exc", "verb.exc"};

    static WordNet load(const std::filesystem::path& dir) {
        namespace fs = std::filesystem;
        for (const char* f : kRequiredFiles)
            if (!fs::is_regular_file(dir / f)) throw IoError((dir / f).string(), "missing WordNet file");
        WordNet wn;
        for (WnPos p : {WnPos::Noun, WnPos::Verb}) {
            const std::string suffix = p == WnPos::Noun ? "noun" : "verb";
            wn.read_data(dir / ("data." + suffix), p);
            wn.read_index(dir / ("index." + suffix), p);
            wn.read_exceptions(dir / (suffix + ".exc"), p);
        }
        return wn;
    }

    const std::vector<Synset>& synsets(WnPos p) const { return table(p).synsets; }

    /// Synset indices for a word in sense order; the word is lemmatized first.
    std::vector<std::size_t> senses(const std::string& word, WnPos p) const {
        const auto& t = table(p);
        for (const auto& cand : base_forms(word, p)) {
            auto it = t.index.find(cand);
            if (it != t.index.end()) return it->second;
        }
        return {};
    }

    /// Ancestor closure including the synset itself.
    std::vector<std::size_t> ancestors(std::size_t synset, WnPos p) const {
        const auto& syn = table(p).synsets;
        std::vector<std::size_t> out{synset};
        std::unordered_set<std::size_t> seen{synset};
        for (std::size_t k = 0; k < out.size(); ++k)
            for (auto h : syn[out[k]].hypernyms)
                if (seen.insert(h).second) out.push_back(h);
        return out;
    }

    std::vector<std::string> base_forms(const std::string& word, WnPos p) const {
        std::string w = to_lower(word);
        std::replace(w.begin(), w.end(), ' ', '_');
        const auto& t = table(p);
        std::vector<std::string> out{w};
        if (auto e = t.exceptions.find(w); e != t.exceptions.end()) out.insert(out.end(), e->second.begin(), e->second.end());
        static const std::pair<const char*, const char*> noun_rules[] = {
            {"s", ""}, {"ses", "s"}, {"xes", "x"}, {"zes", "z"}, {"ches", "ch"}, {"shes", "sh"}, {"men", "man"}, {"ies", "y"}};
        static const std::pair<const char*, const char*> verb_rules[] = {
            {"s", ""}, {"ies", "y"}, {"es", "e"}, {"es", ""}, {"ed", "e"}, {"ed", ""}, {"ing", "e"}, {"ing", ""}};
        auto apply = [&](const auto& rules) {
            for (const auto& [suf, rep] : rules)
                if (ends_with(w, suf) && w.size() > std::string_view(suf).size())
                    out.push_back(w.substr(0, w.size() - std::string_view(suf).size()) + rep);
        };
        if (p == WnPos::Noun) apply(noun_rules);
        else apply(verb_rules);
        return out;
    }

private:
    struct Table {
        std::vector<Synset> synsets;
        std::unordered_map<std::uint64_t, std::size_t> by_offset;
        std::unordered_map<std::string, std::vector<std::size_t>> index;
        std::unordered_map<std::string, std::vector<std::string>> exceptions;
    };

    Table& table(WnPos p) { return p == WnPos::Noun ? nouns_ : verbs_; }
    const Table& table(WnPos p) const { return p == WnPos::Noun ? nouns_ : verbs_; }

    static bool is_header(const std::string& line) { return line.empty() || line[0] == ' '; }

    void read_data(const std::filesystem::path& path, WnPos p) {
        std::ifstream in(path);
        if (!in) throw IoError(path.string(), "cannot open WordNet file");
        auto& t = table(p);
        std::vector<std::vector<std::uint64_t>> pending;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (is_header(line)) continue;
            std::istringstream ss(line.substr(0, line.find('|')));
            Synset s;
            s.pos = p;
            std::string lex_filenum, ss_type, wcnt_hex;
            if (!(ss >> s.offset >> lex_filenum >> ss_type >> wcnt_hex)) throw ParseError(path.string(), lineno, "bad synset line");
            std::size_t wcnt = 0;
            try {
                wcnt = std::stoul(wcnt_hex, nullptr, 16);
            } catch (const std::exception&) {
                throw ParseError(path.string(), lineno, "bad word count");
            }
            for (std::size_t k = 0; k < wcnt; ++k) {
                std::string word, lex_id;
                if (!(ss >> word >> lex_id)) throw ParseError(path.string(), lineno, "truncated word list");
                if (auto paren = word.find('('); paren != std::string::npos) word.resize(paren);  // adjective markers
                s.words.push_back(to_lower(word));
            }
            std::size_t pcnt = 0;
            if (!(ss >> pcnt)) throw ParseError(path.string(), lineno, "missing pointer count");
            std::vector<std::uint64_t> hyper;
            for (std::size_t k = 0; k < pcnt; ++k) {
                std::string sym, pos_c, src_tgt;
                std::uint64_t target = 0;
                if (!(ss >> sym >> target >> pos_c >> src_tgt)) throw ParseError(path.string(), lineno, "truncated pointer list");
                if ((sym == "@" || sym == "@i") && pos_c == std::string(1, p == WnPos::Noun ? 'n' : 'v')) hyper.push_back(target);
            }
            t.by_offset.emplace(s.offset, t.synsets.size());
            t.synsets.push_back(std::move(s));
            pending.push_back(std::move(hyper));
        }
        for (std::size_t i = 0; i < t.synsets.size(); ++i)
            for (auto off : pending[i]) {
                auto it = t.by_offset.find(off);
                if (it == t.by_offset.end())
                    throw ParseError(path.string(), 0, "hypernym pointer to unknown offset " + std::to_string(off));
                t.synsets[i].hypernyms.push_back(it->second);
            }
    }

    void read_index(const std::filesystem::path& path, WnPos p) {
        std::ifstream in(path);
        if (!in) throw IoError(path.string(), "cannot open WordNet file");
        auto& t = table(p);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (is_header(line)) continue;
            std::istringstream ss(line);
            std::string lemma, pos_c;
            std::size_t synset_cnt = 0, p_cnt = 0, sense_cnt = 0, tagsense_cnt = 0;
            if (!(ss >> lemma >> pos_c >> synset_cnt >> p_cnt)) throw ParseError(path.string(), lineno, "bad index line");
            for (std::size_t k = 0; k < p_cnt; ++k) {
                std::string sym;
                ss >> sym;
            }
            if (!(ss >> sense_cnt >> tagsense_cnt)) throw ParseError(path.string(), lineno, "bad index line");
            std::vector<std::size_t> senses;
            for (std::size_t k = 0; k < synset_cnt; ++k) {
                std::uint64_t off = 0;
                if (!(ss >> off)) throw ParseError(path.string(), lineno, "truncated synset offsets");
                auto it = t.by_offset.find(off);
                if (it == t.by_offset.end()) throw ParseError(path.string(), lineno, "unknown synset offset " + std::to_string(off));
                senses.push_back(it->second);
            }
            t.index[to_lower(lemma)] = std::move(senses);
        }
    }

    void read_exceptions(const std::filesystem::path& path, WnPos p) {
        std::ifstream in(path);
        if (!in) throw IoError(path.string(), "cannot open WordNet file");
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::string inflected, base;
            if (!(ss >> inflected)) continue;
            auto& bases = table(p).exceptions[inflected];
            while (ss >> base) bases.push_back(base);
        }
    }

    Table nouns_;
    Table verbs_;
};

/// Corpus-derived information content over a WordNet.
class InformationContent {
public:
    InformationContent(const WordNet& wn, const TermCounts& noun_counts, const TermCounts& verb_counts) : wn_(&wn) {
        build(WnPos::Noun, noun_counts);
        build(WnPos::Verb, verb_counts);
    }

    const WordNet& wordnet() const { return *wn_; }

    double ic(std::size_t synset, WnPos p) const { return p == WnPos::Noun ? noun_ic_[synset] : verb_ic_[synset]; }

    /// Lin similarity maximized over same-POS sense pairs; 0 for unknown words.
    double lin(const std::string& a, const std::string& b, WnPos p) const {
        const auto sa = wn_->senses(a, p);
        const auto sb = wn_->senses(b, p);
        double best = 0.0;
        for (auto x : sa) {
            const auto ax = wn_->ancestors(x, p);
            const std::unordered_set<std::size_t> anc(ax.begin(), ax.end());
            for (auto y : sb) {
                double lcs = 0.0;  // the virtual root has zero information
                for (auto z : wn_->ancestors(y, p))
                    if (anc.count(z)) lcs = std::max(lcs, ic(z, p));
                const double denom = ic(x, p) + ic(y, p);
                if (denom <= 0.0) continue;
                best = std::max(best, 2.0 * lcs / denom);
            }
        }
        return std::clamp(best, 0.0, 1.0);
    }

    double lin_any(const std::string& a, const std::string& b) const {
        return std::max(lin(a, b, WnPos::Noun), lin(a, b, WnPos::Verb));
    }

private:
    void build(WnPos p, const TermCounts& counts) {
        const auto& syn = wn_->synsets(p);
        std::vector<double> own(syn.size(), 0.0);
        for (const auto& [lemma, c] : counts) {
            const auto senses = wn_->senses(lemma, p);
            if (senses.empty()) continue;
            for (auto s : senses) own[s] += static_cast<double>(c) / static_cast<double>(senses.size());
        }
        auto propagate = [&] {
            std::vector<double> prop(syn.size(), 0.0);
            for (std::size_t i = 0; i < syn.size(); ++i) {
                if (own[i] == 0.0) continue;
                for (auto a : wn_->ancestors(i, p)) prop[a] += own[i];
            }
            return prop;
        };
        std::vector<double> prop = propagate();
        // synsets with nothing observed beneath them count once, and so do their ancestors
        bool smoothed = false;
        for (std::size_t i = 0; i < syn.size(); ++i)
            if (prop[i] == 0.0) {
                own[i] = 1.0;
                smoothed = true;
            }
        if (smoothed) prop = propagate();
        double root_total = 0.0;
        for (std::size_t i = 0; i < syn.size(); ++i)
            if (syn[i].hypernyms.empty()) root_total += prop[i];
        auto& out = p == WnPos::Noun ? noun_ic_ : verb_ic_;
        out.resize(syn.size());
        for (std::size_t i = 0; i < syn.size(); ++i) out[i] = root_total > 0 ? -std::log(prop[i] / root_total) : 0.0;
    }

    const WordNet* wn_;
    std::vector<double> noun_ic_;
    std::vector<double> verb_ic_;
};

struct SemScore {
    double hw = 0.0;  // head-word similarity
    double aw = 0.0;  // all-word similarity

    double max() const { return std::max(hw, aw); }
};

namespace detail {

inline std::vector<std::string> content_words(const std::string& term) {
    std::vector<std::string> out;
    std::istringstream in(term);
    for (std::string w; in >> w;)
        if (!is_stopword(w)) out.push_back(w);
    return out;
}

inline std::string head_word(const std::string& term) {
    const auto sp = term.rfind(' ');
    return sp == std::string::npos ? term : term.substr(sp + 1);
}

} // namespace detail

/// Head-word and all-word Lin similarity between two terms.
inline SemScore sem_score(const InformationContent& ic, const std::string& s, const std::string& t) {
    SemScore r;
    r.hw = ic.lin(detail::head_word(s), detail::head_word(t), WnPos::Noun);
    const auto ws = detail::content_words(s);
    const auto wt = detail::content_words(t);
    if (ws.empty() || wt.empty()) return r;
    std::vector<std::vector<double>> m(ws.size(), std::vector<double>(wt.size()));
    for (std::size_t i = 0; i < ws.size(); ++i)
        for (std::size_t j = 0; j < wt.size(); ++j) m[i][j] = ic.lin_any(ws[i], wt[j]);
    double fwd = 0.0, bwd = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) fwd += *std::max_element(m[i].begin(), m[i].end());
    for (std::size_t j = 0; j < wt.size(); ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < ws.size(); ++i) best = std::max(best, m[i][j]);
        bwd += best;
    }
    r.aw = 0.5 * (fwd / static_cast<double>(ws.size()) + bwd / static_cast<double>(wt.size()));
    return r;
}

} // namespace tracefacts
