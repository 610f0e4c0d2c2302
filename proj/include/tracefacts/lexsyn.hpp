#pragma once

#include "tracefacts/corpus.hpp"
#include "tracefacts/error.hpp"
#include "tracefacts/project.hpp"
#include "tracefacts/text.hpp"

#include <boost/regex.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tracefacts {

enum class ArgumentOrder { LeftIsSource, LeftIsTarget };

/// One lexico-syntactic pattern. The relation reads left-chunk RELATION right-chunk
/// when argument_order is LeftIsSource.
struct LspRule {
    std::string name;
    std::string pattern;
    std::string relation_label;
    ArgumentOrder argument_order = ArgumentOrder::LeftIsSource;
    boost::regex compiled;

    LspRule(std::string n, std::string p, std::string label, ArgumentOrder order = ArgumentOrder::LeftIsSource)
        : name(std::move(n)), pattern(std::move(p)), relation_label(std::move(label)), argument_order(order) {
        try {
            compiled = boost::regex(pattern, boost::regex::perl | boost::regex::icase);
        } catch (const boost::regex_error& e) {
            throw ValidationError("invalid pattern for rule " + name + ": " + e.what());
        }
        if (relation_label.empty()) throw ValidationError("rule " + name + " has an empty relation label");
    }
};

/// The four taxonomic/compositional patterns, transcribed character for character.
inline std::vector<LspRule> default_lsp_rules() {
    return {
        {"SubClass", R"( (and|or) (similar|other) )", "is-subclass-of"},
        {"SuperClass", R"( (such as |including |eg |ie |(?<!that )(?<!to )include(s)? ))", "is-superclass-of"},
        {"IsPartOf",
         R"( (?<!that )(?<!to )(is|are|,|(can|must|shall|may|might)be) (located|situated|found|incorporated) ([io]n|at ))",
         "is-part-of"},
        {"HasPart",
         R"( (?<!that )(?<!to )((consist(s)?of |incorporate(?!d) |(is|are|,|(can|shall|must|may|might) be) (made up|comprised) of|contain(s)? )))",
         "has-part"},
    };
}

inline nlohmann::json rules_to_json(const std::vector<LspRule>& rules) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rules)
        arr.push_back({{"name", r.name},
                       {"pattern", r.pattern},
                       {"relation_label", r.relation_label},
                       {"argument_order", r.argument_order == ArgumentOrder::LeftIsSource ? "left_is_source" : "left_is_target"}});
    return arr;
}

inline std::vector<LspRule> rules_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw ValidationError("rules file must hold a JSON array");
    std::vector<LspRule> rules;
    for (const auto& r : arr) {
        const std::string order = r.value("argument_order", "left_is_source");
        if (order != "left_is_source" && order != "left_is_target")
            throw ValidationError("unknown argument_order " + order);
        rules.emplace_back(r.at("name").get<std::string>(), r.at("pattern").get<std::string>(),
                           r.at("relation_label").get<std::string>(),
                           order == "left_is_source" ? ArgumentOrder::LeftIsSource : ArgumentOrder::LeftIsTarget);
    }
    return rules;
}

inline std::vector<LspRule> load_lsp_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open rules file");
    try {
        return rules_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 1, e.what());
    }
}

enum class SynTechnique { Lsp, Grammatical };

struct SynEvidence {
    std::string left_term;   // relation subject
    std::string right_term;  // relation object
    std::string relation_label;
    bool reversed = false;  // subject is the link's target term
    SynTechnique technique = SynTechnique::Lsp;
    std::string origin;  // artifact id or corpus document path
    bool from_artifact = false;
    std::size_t sentence_index = 0;

    std::string display_relation() const { return reversed ? relation_label + " (Reverse)" : relation_label; }
};

inline nlohmann::json to_json(const SynEvidence& e) {
    return {{"left_term", e.left_term},
            {"right_term", e.right_term},
            {"relation_label", e.relation_label},
            {"reversed", e.reversed},
            {"technique", e.technique == SynTechnique::Lsp ? "lsp" : "grammatical"},
            {"origin", e.origin},
            {"sentence_index", e.sentence_index}};
}

namespace detail {

struct MatchText {
    std::string text;
    std::vector<std::size_t> starts;  // offset of each token in text
};

inline MatchText render_for_matching(const Sentence& s) {
    MatchText m;
    for (const auto& t : s) {
        if (!m.text.empty()) m.text.push_back(' ');
        m.starts.push_back(m.text.size());
        const std::string lower = to_lower(t.surface);
        if (lower == "e.g." || lower == "e.g") m.text += "eg";
        else if (lower == "i.e." || lower == "i.e") m.text += "ie";
        else m.text += t.surface;
    }
    m.text.push_back(' ');
    return m;
}

inline std::size_t first_token_at_or_after(const MatchText& m, std::size_t offset) {
    return static_cast<std::size_t>(std::lower_bound(m.starts.begin(), m.starts.end(), offset) - m.starts.begin());
}

inline bool is_chunk_pos(Pos p) { return p == Pos::Noun || p == Pos::Adj; }

// Noun chunk ending exactly at `end`, at most kMaxTermTokens long.
inline std::optional<Span> chunk_ending_at(const Sentence& s, std::size_t end) {
    if (end == 0 || end > s.size() || s[end - 1].pos != Pos::Noun) return std::nullopt;
    std::size_t b = end - 1;
    while (b > 0 && is_chunk_pos(s[b - 1].pos) && end - (b - 1) <= kMaxTermTokens) --b;
    return Span{b, end};
}

// Noun chunk starting at `begin` after skipping determiners.
inline std::optional<Span> chunk_starting_at(const Sentence& s, std::size_t begin) {
    while (begin < s.size() && s[begin].pos == Pos::Det) ++begin;
    std::size_t e = begin;
    std::size_t last_noun = s.size();
    while (e < s.size() && is_chunk_pos(s[e].pos) && e - begin < kMaxTermTokens) {
        if (s[e].pos == Pos::Noun) last_noun = e;
        ++e;
    }
    if (last_noun == s.size()) return std::nullopt;
    return Span{begin, last_noun + 1};
}

inline std::string span_text(const Sentence& s, Span sp) { return join_lemmas(s, sp); }

} // namespace detail

/// Pairs each pattern match with the noun chunks touching it on either side.
inline std::vector<SynEvidence> match_lsp(const Sentence& sentence, const std::vector<LspRule>& rules) {
    std::vector<SynEvidence> out;
    if (sentence.empty()) return out;
    const detail::MatchText m = detail::render_for_matching(sentence);
    for (const auto& rule : rules) {
        boost::sregex_iterator it(m.text.begin(), m.text.end(), rule.compiled), end;
        for (; it != end; ++it) {
            const auto b = static_cast<std::size_t>(it->position());
            const auto e = b + static_cast<std::size_t>(it->length());
            const std::size_t k0 = detail::first_token_at_or_after(m, b);
            const std::size_t k1 = detail::first_token_at_or_after(m, e);
            if (k0 >= sentence.size() || k1 > sentence.size()) continue;
            auto left = detail::chunk_ending_at(sentence, k0);
            auto right = detail::chunk_starting_at(sentence, k1);
            if (!left || !right) continue;
            std::string left_text = detail::span_text(sentence, *left);
            std::string right_text = detail::span_text(sentence, *right);
            // "rear of the pump": keep an of-attachment on the right-hand chunk
            std::size_t j = right->end;
            if (j < sentence.size() && to_lower(sentence[j].surface) == "of") {
                if (auto pp = detail::chunk_starting_at(sentence, j + 1)) {
                    right_text = join_lemmas(sentence, {right->begin, pp->end});
                }
            }
            if (left_text == right_text) continue;
            SynEvidence ev;
            ev.technique = SynTechnique::Lsp;
            ev.relation_label = rule.relation_label;
            ev.sentence_index = sentence.front().sentence_index;
            if (rule.argument_order == ArgumentOrder::LeftIsSource) {
                ev.left_term = std::move(left_text);
                ev.right_term = std::move(right_text);
            } else {
                ev.left_term = std::move(right_text);
                ev.right_term = std::move(left_text);
            }
            out.push_back(std::move(ev));
        }
    }
    return out;
}

namespace detail {

struct VerbGroup {
    std::vector<std::string> labels;  // one per coordinated verb
    bool finite = true;
};

inline bool is_conjunction(const Token& t) {
    const std::string w = to_lower(t.surface);
    return w == "and" || w == "or";
}

// Parses tokens[b, e) as ADV* (AUX ADV*)* VERB ((and|or|,) AUX* VERB)* PREP? DET*.
inline std::optional<VerbGroup> parse_verb_group(const Sentence& s, std::size_t b, std::size_t e) {
    std::size_t i = b;
    std::vector<std::string> aux;  // copula/have forms kept in the label
    bool saw_aux = false;
    std::vector<std::pair<std::string, std::vector<std::string>>> verbs;  // verb surface + its auxiliaries
    auto skip_adv = [&] {
        while (i < e && s[i].pos == Pos::Adv) ++i;
    };
    while (true) {
        skip_adv();
        std::vector<std::string> own_aux;
        while (i < e && s[i].pos == Pos::Verb && is_auxiliary(to_lower(s[i].surface))) {
            const std::string w = to_lower(s[i].surface);
            if (!is_modal(w) && w != "do" && w != "does" && w != "did") own_aux.push_back(w);
            saw_aux = true;
            ++i;
            skip_adv();
            if (to_lower(s[i < e ? i : e - 1].surface) == "not") return std::nullopt;
        }
        if (i >= e || s[i].pos != Pos::Verb) {
            // a bare copula ("is in") is not a relation
            return std::nullopt;
        }
        if (own_aux.empty() && !verbs.empty()) own_aux = verbs.front().second;
        verbs.emplace_back(to_lower(s[i].surface), own_aux);
        ++i;
        skip_adv();
        if (i < e && (is_conjunction(s[i]) || s[i].surface == ",") && i + 1 < e &&
            (s[i + 1].pos == Pos::Verb || s[i + 1].pos == Pos::Adv)) {
            ++i;
            continue;
        }
        break;
    }
    std::string prep;
    if (i < e && s[i].pos == Pos::Prep) prep = to_lower(s[i++].surface);
    while (i < e && s[i].pos == Pos::Det) ++i;
    if (i != e) return std::nullopt;

    VerbGroup g;
    const std::string& first = verbs.front().first;
    const bool participle = ends_with(first, "ed") || ends_with(first, "en");
    const bool gerund = ends_with(first, "ing");
    g.finite = saw_aux || !(participle || gerund);
    for (auto& [verb, own_aux] : verbs) {
        std::string label;
        for (const auto& a : own_aux) label += a + " ";
        // reduced passive relative: "drug loaded into" reads as "is loaded into"
        if (own_aux.empty() && !saw_aux && !prep.empty() && (ends_with(verb, "ed") || ends_with(verb, "en")))
            label += "is ";
        label += verb;
        if (!prep.empty()) label += " " + prep;
        g.labels.push_back(std::move(label));
    }
    return g;
}

// "X's press of Y": possessive plus a verb-capable head noun.
inline std::optional<std::string> parse_possessive(const Sentence& s, std::size_t b, std::size_t e,
                                                   const Lexicon& lex) {
    std::size_t i = b;
    if (i >= e || (s[i].surface != "'s" && s[i].surface != "'")) return std::nullopt;
    ++i;
    if (i >= e) return std::nullopt;
    const std::string head = to_lower(s[i].surface);
    if (!lex.contains(head, Pos::Verb) && s[i].pos != Pos::Verb) return std::nullopt;
    ++i;
    std::string label = head;
    if (i < e && s[i].pos == Pos::Prep) label += " " + to_lower(s[i++].surface);
    while (i < e && s[i].pos == Pos::Det) ++i;
    if (i != e) return std::nullopt;
    return label;
}

} // namespace detail

/// Verb-mediated relations between neighbouring domain-term spans of one sentence.
inline std::vector<SynEvidence> match_grammatical(const Sentence& sentence, const std::vector<TermSpan>& spans,
                                                  const Lexicon& lex = Lexicon::builtin()) {
    std::vector<SynEvidence> out;
    std::optional<std::string> subject;  // subject of the last finite verb group
    const std::size_t sidx = sentence.empty() ? 0 : sentence.front().sentence_index;
    auto emit = [&](const std::string& l, const std::string& r, std::string label) {
        if (l == r) return;
        SynEvidence ev;
        ev.left_term = l;
        ev.right_term = r;
        ev.relation_label = std::move(label);
        ev.technique = SynTechnique::Grammatical;
        ev.sentence_index = sidx;
        out.push_back(std::move(ev));
    };
    for (std::size_t k = 0; k + 1 < spans.size(); ++k) {
        const TermSpan& a = spans[k];
        const TermSpan& b = spans[k + 1];
        const std::size_t from = a.span.end, to = b.span.begin;
        if (from >= to) continue;
        if (auto g = detail::parse_verb_group(sentence, from, to)) {
            for (auto& label : g->labels) emit(a.term, b.term, std::move(label));
            if (g->finite) subject = a.term;
            continue;
        }
        if (auto label = detail::parse_possessive(sentence, from, to, lex)) {
            emit(a.term, b.term, std::move(*label));
            continue;
        }
        // clause coordination: "... and retrieves the Y" shares the earlier subject
        if (!subject) continue;
        for (std::size_t c = to; c-- > from + 1;) {
            if (!detail::is_conjunction(sentence[c])) continue;
            if (auto g = detail::parse_verb_group(sentence, c + 1, to); g && g->finite) {
                for (auto& label : g->labels) emit(*subject, b.term, std::move(label));
            }
            break;
        }
    }
    return out;
}

/// SYN evidence gathered over artifacts and domain documents, keyed by unordered term pair.
class SynIndex {
public:
    SynIndex() = default;

    SynIndex(const Project& project, const CorpusStats& corpus, const std::vector<Document>& domain_docs,
             const std::vector<LspRule>& rules, const Lexicon& lex = Lexicon::builtin()) {
        for (const auto& a : project.artifacts())
            for (const auto& s : a.sentences) index_sentence(s, corpus, rules, lex, a.id, true);
        for (const auto& d : domain_docs)
            for (const auto& s : d.sentences) index_sentence(s, corpus, rules, lex, d.path, false);
    }

    void add(SynEvidence ev) {
        if (ev.left_term == ev.right_term || ev.relation_label.empty()) return;
        entries_[key(ev.left_term, ev.right_term)].push_back(std::move(ev));
        ++size_;
    }

    std::size_t size() const { return size_; }

    std::vector<SynEvidence> all() const {
        std::vector<SynEvidence> v;
        for (const auto& [k, list] : entries_) v.insert(v.end(), list.begin(), list.end());
        return v;
    }

    /// Highest-priority evidence connecting the two terms, oriented against the link.
    std::optional<SynEvidence> evidence_for_link(const TraceLink& link, const std::string& source_term,
                                                 const std::string& target_term) const {
        auto it = entries_.find(key(source_term, target_term));
        if (it == entries_.end()) return std::nullopt;
        const SynEvidence* best = nullptr;
        auto rank = [&](const SynEvidence& e) {
            const bool own = e.from_artifact && (e.origin == link.source_id || e.origin == link.target_id);
            return std::pair<int, int>{own ? 0 : 1, e.technique == SynTechnique::Lsp ? 0 : 1};
        };
        for (const auto& e : it->second)
            if (!best || rank(e) < rank(*best)) best = &e;
        SynEvidence ev = *best;
        ev.reversed = ev.left_term == target_term && ev.right_term == source_term;
        return ev;
    }

private:
    static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }

    // Longest domain-specific term that ends the chunk text, if different from it.
    static std::optional<std::string> domain_suffix(const std::string& chunk, const CorpusStats& corpus) {
        if (corpus.is_domain_specific(chunk)) return std::nullopt;
        std::size_t pos = 0;
        while ((pos = chunk.find(' ', pos)) != std::string::npos) {
            ++pos;
            std::string tail = chunk.substr(pos);
            if (tail.find(" of ") != std::string::npos) continue;
            if (corpus.is_domain_specific(tail)) return tail;
        }
        return std::nullopt;
    }

    void index_sentence(const Sentence& s, const CorpusStats& corpus, const std::vector<LspRule>& rules,
                        const Lexicon& lex, const std::string& origin, bool from_artifact) {
        for (auto& ev : match_lsp(s, rules)) {
            ev.origin = origin;
            ev.from_artifact = from_artifact;
            const auto ls = domain_suffix(ev.left_term, corpus);
            const auto rs = domain_suffix(ev.right_term, corpus);
            if (ls || rs) {
                SynEvidence alias = ev;
                if (ls) alias.left_term = *ls;
                if (rs) alias.right_term = *rs;
                add(std::move(alias));
            }
            add(std::move(ev));
        }
        const auto spans = corpus.find_spans(s);
        if (spans.size() < 2) return;
        for (auto& ev : match_grammatical(s, spans, lex)) {
            ev.origin = origin;
            ev.from_artifact = from_artifact;
            add(std::move(ev));
        }
    }

    std::map<std::pair<std::string, std::string>, std::vector<SynEvidence>> entries_;
    std::size_t size_ = 0;
};

} // namespace tracefacts
