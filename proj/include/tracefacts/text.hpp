#pragma once

#include "tracefacts/error.hpp"
#include "tracefacts/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tracefacts {

struct Token {
    std::string surface;
    std::string lemma;
    Pos pos = Pos::Other;
    std::size_t sentence_index = 0;
    std::size_t token_index = 0;
    std::size_t offset = 0;       // byte offset into the analyzed text
    std::string space_before;     // whitespace between the previous token and this one
    std::string space_after;      // set on the final token of the text only
};

using Sentence = std::vector<Token>;

/// Half-open token range within a sentence.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    friend bool operator==(const Span&, const Span&) = default;
};

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline bool is_modal(std::string_view w) {
    static const std::unordered_set<std::string_view> modals{
        "can", "could", "may", "might", "must", "shall", "should", "will", "would", "cannot"};
    return modals.count(w) != 0;
}

inline bool is_auxiliary(std::string_view w) {
    static const std::unordered_set<std::string_view> aux{
        "be", "is", "are", "was", "were", "been", "being", "am", "have", "has", "had", "do", "does", "did"};
    return aux.count(w) != 0 || is_modal(w);
}

inline bool is_copula(std::string_view w) {
    static const std::unordered_set<std::string_view> be{"be", "is", "are", "was", "were", "been", "being", "am"};
    return be.count(w) != 0;
}

/// Function words excluded from phrase-level relatedness and topic documents.
inline bool is_stopword(std::string_view w) {
    const Lexicon& lex = Lexicon::builtin();
    return lex.is_closed_class(w);
}

namespace detail {

inline bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Length of the UTF-8 sequence starting at lead byte c (1 for invalid bytes).
inline std::size_t utf8_len(unsigned char c) {
    if (c < 0x80) return 1;
    if ((c >> 5) == 0x6) return 2;
    if ((c >> 4) == 0xE) return 3;
    if ((c >> 3) == 0x1E) return 4;
    return 1;
}

inline char32_t utf8_decode(std::string_view s, std::size_t i, std::size_t len) {
    auto b = [&](std::size_t k) { return static_cast<unsigned char>(s[i + k]); };
    switch (len) {
    case 2: return static_cast<char32_t>(((b(0) & 0x1F) << 6) | (b(1) & 0x3F));
    case 3: return static_cast<char32_t>(((b(0) & 0x0F) << 12) | ((b(1) & 0x3F) << 6) | (b(2) & 0x3F));
    case 4:
        return static_cast<char32_t>(((b(0) & 0x07) << 18) | ((b(1) & 0x3F) << 12) | ((b(2) & 0x3F) << 6) |
                                     (b(3) & 0x3F));
    default: return b(0);
    }
}

// Word character at byte i; `len` receives the byte length of the character.
inline bool is_word_char(std::string_view s, std::size_t i, std::size_t& len) {
    const auto c = static_cast<unsigned char>(s[i]);
    len = std::min(utf8_len(c), s.size() - i);
    if (c < 0x80) return std::isalnum(c) != 0;
    const char32_t cp = utf8_decode(s, i, len);
    // Latin-1 punctuation/symbols and the General Punctuation block.
    if (cp >= 0x00A0 && cp <= 0x00BF) return false;
    if (cp >= 0x2000 && cp <= 0x206F) return false;
    return true;
}

inline bool word_char_at(std::string_view s, std::size_t i) {
    std::size_t len = 0;
    return i < s.size() && !is_space(static_cast<unsigned char>(s[i])) && is_word_char(s, i, len);
}

inline const std::unordered_set<std::string_view>& abbreviations() {
    static const std::unordered_set<std::string_view> abbr{
        "e.g.", "i.e.", "etc.", "vs.", "cf.", "al.", "dr.", "mr.", "mrs.", "ms.", "prof.", "inc.", "ltd.",
        "co.", "no.", "fig.", "approx.", "dept.", "st.", "jr.", "sr.", "u.s.", "u.k.", "e.g", "i.e"};
    return abbr;
}

inline bool is_acronym(std::string_view w) {
    std::size_t upper = 0;
    std::size_t i = 0;
    for (; i < w.size(); ++i) {
        const auto c = static_cast<unsigned char>(w[i]);
        if (std::isupper(c)) ++upper;
        else if (std::isdigit(c) || c == '-') continue;
        else break;
    }
    if (i == w.size()) return upper >= 2;
    return upper >= 2 && i + 1 == w.size() && w[i] == 's';
}

} // namespace detail

/// Tokenizer, sentence splitter, lemmatizer, and tagger over a Lexicon.
class Analyzer {
public:
    Analyzer() : lexicon_(Lexicon::builtin()) { install_builtin_exceptions(); }
    explicit Analyzer(Lexicon lexicon) : lexicon_(std::move(lexicon)) { install_builtin_exceptions(); }

    static const Analyzer& default_instance() {
        static const Analyzer a;
        return a;
    }

    /// Analyzer whose lexicon and exception lists are extended from a WordNet dict directory.
    static Analyzer with_wordnet(const std::filesystem::path& dir) {
        Lexicon lex = Lexicon::builtin();
        lex.augment_from_wordnet(dir);
        Analyzer a(std::move(lex));
        a.load_exceptions(dir / "noun.exc", a.noun_exc_);
        a.load_exceptions(dir / "verb.exc", a.verb_exc_);
        return a;
    }

    const Lexicon& lexicon() const { return lexicon_; }

    std::vector<Sentence> analyze(std::string_view text) const {
        std::vector<Sentence> sentences = split(tokenize(text));
        for (std::size_t s = 0; s < sentences.size(); ++s) {
            for (std::size_t t = 0; t < sentences[s].size(); ++t) {
                sentences[s][t].sentence_index = s;
                sentences[s][t].token_index = t;
            }
            tag(sentences[s]);
        }
        return sentences;
    }

    std::string noun_lemma(std::string_view lower) const {
        if (auto it = noun_exc_.find(std::string(lower)); it != noun_exc_.end()) return it->second;
        if (lower.size() <= 3 || !ends_with(lower, "s")) return std::string(lower);
        if (lexicon_.contains(lower, Pos::Noun)) return std::string(lower);
        for (const auto& cand : noun_candidates(lower))
            if (lexicon_.contains(cand, Pos::Noun)) return cand;
        if (ends_with(lower, "ss") || ends_with(lower, "us") || ends_with(lower, "is")) return std::string(lower);
        if (ends_with(lower, "ies") && lower.size() > 4) return std::string(lower.substr(0, lower.size() - 3)) + "y";
        for (std::string_view sfx : {"sses", "xes", "zes", "ches", "shes"})
            if (ends_with(lower, sfx)) return std::string(lower.substr(0, lower.size() - 2));
        return std::string(lower.substr(0, lower.size() - 1));
    }

    std::string verb_lemma(std::string_view lower) const {
        if (auto it = verb_exc_.find(std::string(lower)); it != verb_exc_.end()) return it->second;
        if (lexicon_.contains(lower, Pos::Verb) && !ends_with(lower, "ed") && !ends_with(lower, "ing"))
            return std::string(lower);
        const auto cands = verb_candidates(lower);
        for (const auto& cand : cands)
            if (lexicon_.contains(cand, Pos::Verb)) return cand;
        if (lexicon_.contains(lower, Pos::Verb)) return std::string(lower);
        return cands.empty() ? std::string(lower) : cands.back();
    }

private:
    static std::vector<std::string> noun_candidates(std::string_view w) {
        std::vector<std::string> out;
        auto strip = [&](std::string_view sfx, std::string_view repl) {
            if (ends_with(w, sfx) && w.size() > sfx.size())
                out.push_back(std::string(w.substr(0, w.size() - sfx.size())) + std::string(repl));
        };
        strip("s", "");
        strip("ses", "s");
        strip("xes", "x");
        strip("zes", "z");
        strip("ches", "ch");
        strip("shes", "sh");
        strip("men", "man");
        strip("ies", "y");
        return out;
    }

    // Candidates in WordNet detachment order; the last one is the fallback guess.
    static std::vector<std::string> verb_candidates(std::string_view w) {
        std::vector<std::string> out;
        auto base = [&](std::size_t n) { return std::string(w.substr(0, w.size() - n)); };
        if (ends_with(w, "ies") && w.size() > 4) out.push_back(base(3) + "y");
        if (ends_with(w, "es") && w.size() > 3) {
            out.push_back(base(2) + "e");
            out.push_back(base(2));
        }
        if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 2) out.push_back(base(1));
        auto participle = [&](std::size_t n) {
            std::string stem = base(n);
            if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
                std::string_view("aeiousl").find(stem.back()) == std::string_view::npos)
                out.push_back(stem.substr(0, stem.size() - 1));
            out.push_back(stem + "e");
            out.push_back(stem);
            // Without a dictionary hit prefer the bare stem unless it ends in a
            // consonant cluster that English verbs rarely end with.
            const bool wants_e = stem.size() >= 2 && std::string_view("aeiou").find(stem[stem.size() - 2]) != std::string_view::npos &&
                                 std::string_view("tvzcgsu").find(stem.back()) != std::string_view::npos;
            if (wants_e) out.push_back(stem + "e");
            else out.push_back(stem);
        };
        if (ends_with(w, "ied") && w.size() > 4) out.push_back(base(3) + "y");
        else if (ends_with(w, "ed") && w.size() > 3) participle(2);
        if (ends_with(w, "ing") && w.size() > 4) participle(3);
        return out;
    }

    void install_builtin_exceptions() {
        static const std::pair<const char*, const char*> nouns[] = {
            {"men", "man"}, {"women", "woman"}, {"children", "child"}, {"people", "person"},
            {"feet", "foot"}, {"teeth", "tooth"}, {"mice", "mouse"}, {"criteria", "criterion"},
            {"analyses", "analysis"}, {"diagnoses", "diagnosis"}, {"hypotheses", "hypothesis"},
            {"syntheses", "synthesis"}, {"crises", "crisis"}, {"theses", "thesis"},
            {"prognoses", "prognosis"}, {"indices", "index"}, {"matrices", "matrix"},
            {"vertices", "vertex"}, {"phenomena", "phenomenon"}, {"bases", "basis"}, {"axes", "axis"}};
        static const std::pair<const char*, const char*> verbs[] = {
            {"is", "be"}, {"are", "be"}, {"was", "be"}, {"were", "be"}, {"been", "be"}, {"am", "be"},
            {"being", "be"}, {"has", "have"}, {"had", "have"}, {"having", "have"}, {"does", "do"},
            {"did", "do"}, {"done", "do"}, {"made", "make"}, {"found", "find"}, {"built", "build"},
            {"sent", "send"}, {"ran", "run"}, {"written", "write"}, {"wrote", "write"},
            {"chosen", "choose"}, {"chose", "choose"}, {"given", "give"}, {"gave", "give"},
            {"taken", "take"}, {"took", "take"}, {"shown", "show"}, {"seen", "see"}, {"saw", "see"},
            {"heard", "hear"}, {"kept", "keep"}, {"got", "get"}, {"gotten", "get"}, {"left", "leave"},
            {"meant", "mean"}, {"held", "hold"}, {"brought", "bring"}, {"thought", "think"},
            {"bought", "buy"}, {"sold", "sell"}, {"told", "tell"}, {"stood", "stand"},
            {"understood", "understand"}, {"began", "begin"}, {"begun", "begin"}, {"became", "become"},
            {"came", "come"}, {"went", "go"}, {"gone", "go"}, {"known", "know"}, {"knew", "know"},
            {"grew", "grow"}, {"grown", "grow"}, {"drew", "draw"}, {"drawn", "draw"}, {"paid", "pay"},
            {"laid", "lay"}, {"led", "lead"}, {"fed", "feed"}, {"met", "meet"}, {"lost", "lose"},
            {"spent", "spend"}, {"dealt", "deal"}, {"felt", "feel"}, {"fell", "fall"},
            {"fallen", "fall"}, {"caught", "catch"}, {"said", "say"}, {"told", "tell"}};
        for (const auto& [k, v] : nouns) noun_exc_.emplace(k, v);
        for (const auto& [k, v] : verbs) verb_exc_.emplace(k, v);
    }

    static void load_exceptions(const std::filesystem::path& path, std::unordered_map<std::string, std::string>& into) {
        std::ifstream in(path);
        if (!in) throw IoError(path.string(), "cannot open WordNet exception list");
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream fields(line);
            std::string inflected, base;
            if (fields >> inflected >> base && inflected.find('_') == std::string::npos)
                into.insert_or_assign(inflected, base);
        }
    }

    std::vector<Token> tokenize(std::string_view text) const {
        std::vector<Token> tokens;
        std::size_t i = 0;
        std::string pending_space;
        while (i < text.size()) {
            const auto c = static_cast<unsigned char>(text[i]);
            if (detail::is_space(c)) {
                pending_space.push_back(text[i]);
                ++i;
                continue;
            }
            const std::size_t start = i;
            std::size_t len = 0;
            if (detail::is_word_char(text, i, len)) {
                i += len;
                while (i < text.size()) {
                    if (detail::is_word_char(text, i, len) && !detail::is_space(static_cast<unsigned char>(text[i]))) {
                        i += len;
                        continue;
                    }
                    const char ch = text[i];
                    // possessive clitic splits off as its own token
                    if (ch == '\'' && i + 1 < text.size() && (text[i + 1] == 's' || text[i + 1] == 'S') &&
                        !detail::word_char_at(text, i + 2))
                        break;
                    if ((ch == '-' || ch == '/' || ch == '\'' || ch == '.' || ch == '&' || ch == '_') &&
                        detail::word_char_at(text, i + 1)) {
                        ++i;
                        continue;
                    }
                    break;
                }
                if (i < text.size() && text[i] == '.') {
                    const std::string with_dot = to_lower(text.substr(start, i + 1 - start));
                    if (detail::abbreviations().count(with_dot)) ++i;
                }
            } else if (text[i] == '\'' && i + 1 < text.size() && (text[i + 1] == 's' || text[i + 1] == 'S') &&
                       !detail::word_char_at(text, i + 2) && !tokens.empty() && pending_space.empty()) {
                i += 2;
            } else {
                i += std::max<std::size_t>(len, 1);
            }
            Token tok;
            tok.surface = std::string(text.substr(start, i - start));
            tok.offset = start;
            tok.space_before = std::move(pending_space);
            pending_space.clear();
            tokens.push_back(std::move(tok));
        }
        if (!tokens.empty()) tokens.back().space_after = std::move(pending_space);
        return tokens;
    }

    static std::vector<Sentence> split(std::vector<Token> tokens) {
        std::vector<Sentence> out;
        Sentence cur;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (!cur.empty() && tokens[i].space_before.find("\n\n") != std::string::npos) {
                out.push_back(std::move(cur));
                cur.clear();
            }
            cur.push_back(std::move(tokens[i]));
            const std::string& s = cur.back().surface;
            if (s == "." || s == "!" || s == "?") {
                const bool last = i + 1 == tokens.size();
                const bool boundary =
                    last || (!tokens[i + 1].space_before.empty() &&
                             (std::isupper(static_cast<unsigned char>(tokens[i + 1].surface[0])) ||
                              std::isdigit(static_cast<unsigned char>(tokens[i + 1].surface[0]))));
                if (boundary) {
                    out.push_back(std::move(cur));
                    cur.clear();
                }
            }
        }
        if (!cur.empty()) out.push_back(std::move(cur));
        return out;
    }

    // Admissible tags for a token, ignoring context.
    LexEntry lexical_entry(const std::string& surface, const std::string& lower) const {
        const auto first = static_cast<unsigned char>(surface[0]);
        if (!detail::word_char_at(surface, 0)) return {Pos::Other, 1u << static_cast<int>(Pos::Other)};
        if (std::isdigit(first)) return {Pos::Other, 1u << static_cast<int>(Pos::Other)};
        if (detail::is_acronym(surface))
            return {Pos::Noun, 1u << static_cast<int>(Pos::Noun)};
        if (const LexEntry* e = lexicon_.find(lower)) return *e;
        auto mk = [](Pos p) { return LexEntry{p, static_cast<std::uint8_t>(1u << static_cast<int>(p))}; };
        if (ends_with(lower, "s") && lower.size() > 3) {
            LexEntry e{};
            const std::string n = noun_lemma(lower);
            const std::string v = verb_lemma(lower);
            const LexEntry* ne = n != lower ? lexicon_.find(n) : nullptr;
            const LexEntry* ve = v != lower ? lexicon_.find(v) : nullptr;
            if (ne && ne->allows(Pos::Noun)) e.mask |= 1u << static_cast<int>(Pos::Noun);
            if (ve && ve->allows(Pos::Verb)) e.mask |= 1u << static_cast<int>(Pos::Verb);
            if (e.mask != 0) {
                const LexEntry* base = ne ? ne : ve;
                e.primary = e.allows(base->primary) ? base->primary : (e.allows(Pos::Noun) ? Pos::Noun : Pos::Verb);
                return e;
            }
        }
        if ((ends_with(lower, "ed") && lower.size() > 3) || (ends_with(lower, "ing") && lower.size() > 4)) {
            return mk(Pos::Verb);
        }
        for (std::string_view sfx : {"tion", "sion", "ment", "ity", "ness", "ance", "ence", "ship", "ism", "ist"})
            if (ends_with(lower, sfx)) return mk(Pos::Noun);
        if (ends_with(lower, "ly") && lower.size() > 4) return mk(Pos::Adv);
        for (std::string_view sfx : {"ous", "ful", "less", "able", "ible", "ive", "ical"})
            if (ends_with(lower, sfx) && lower.size() > sfx.size() + 2) return mk(Pos::Adj);
        return mk(Pos::Noun);
    }

    void tag(Sentence& sentence) const {
        std::vector<LexEntry> entries;
        std::vector<std::string> lowers;
        entries.reserve(sentence.size());
        for (const auto& tok : sentence) {
            lowers.push_back(to_lower(tok.surface));
            entries.push_back(lexical_entry(tok.surface, lowers.back()));
        }
        for (std::size_t i = 0; i < sentence.size(); ++i) {
            const LexEntry& e = entries[i];
            Pos pos = e.primary;
            if (e.ambiguous()) {
                const bool has_prev = i > 0;
                const Pos prev = has_prev ? sentence[i - 1].pos : Pos::Other;
                const std::string& prev_w = has_prev ? lowers[i - 1] : lowers[i];
                const Pos next = i + 1 < sentence.size() ? entries[i + 1].primary : Pos::Other;
                const bool next_is_word = i + 1 < sentence.size() && detail::word_char_at(lowers[i + 1], 0);
                if (e.allows(Pos::Verb) && has_prev && (is_modal(prev_w) || prev_w == "to" || prev_w == "do" ||
                                                        prev_w == "does" || prev_w == "did" || prev_w == "not"))
                    pos = Pos::Verb;
                else if (e.allows(Pos::Adj) && next == Pos::Noun && next_is_word)
                    pos = Pos::Adj;
                else if (e.allows(Pos::Noun) && has_prev &&
                         (prev == Pos::Det || prev == Pos::Adj || prev_w == "'s" || prev == Pos::Verb ||
                          (prev == Pos::Prep && prev_w != "to") ||
                          std::isdigit(static_cast<unsigned char>(prev_w[0]))))
                    pos = Pos::Noun;
                else if (e.allows(Pos::Verb) && has_prev && prev == Pos::Noun && next_is_word &&
                         (next == Pos::Det || next == Pos::Adv))
                    pos = Pos::Verb;
            }
            sentence[i].pos = pos;
            sentence[i].lemma = lemma_for(sentence[i].surface, lowers[i], pos);
        }
    }

    std::string lemma_for(const std::string& surface, const std::string& lower, Pos pos) const {
        if (detail::is_acronym(surface)) {
            if (surface.back() == 's') return lower.substr(0, lower.size() - 1);
            return lower;
        }
        if (pos == Pos::Noun) return noun_lemma(lower);
        if (pos == Pos::Verb) return verb_lemma(lower);
        if (lower == "e.g." || lower == "e.g") return "eg";
        if (lower == "i.e." || lower == "i.e") return "ie";
        return lower;
    }

    Lexicon lexicon_;
    std::unordered_map<std::string, std::string> noun_exc_;
    std::unordered_map<std::string, std::string> verb_exc_;
};

inline std::vector<Sentence> tokenize_and_tag(std::string_view text) {
    return Analyzer::default_instance().analyze(text);
}

/// Concatenates surfaces with their recorded whitespace; inverse of tokenization.
inline std::string reconstruct(const std::vector<Sentence>& sentences) {
    std::string out;
    for (const auto& s : sentences)
        for (const auto& t : s) out += t.space_before + t.surface + t.space_after;
    return out;
}

inline bool is_word(const Token& t) { return detail::word_char_at(t.surface, 0); }

/// Maximal (ADJ|NOUN)* NOUN runs, trimmed so each ends on a noun.
inline std::vector<Span> noun_chunks(const Sentence& s) {
    std::vector<Span> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i].pos != Pos::Noun && s[i].pos != Pos::Adj) {
            ++i;
            continue;
        }
        std::size_t j = i;
        std::size_t last_noun = s.size();
        while (j < s.size() && (s[j].pos == Pos::Noun || s[j].pos == Pos::Adj)) {
            if (s[j].pos == Pos::Noun) last_noun = j;
            ++j;
        }
        if (last_noun != s.size()) out.push_back({i, last_noun + 1});
        i = j;
    }
    return out;
}

inline std::string join_lemmas(const Sentence& s, Span span) {
    std::string out;
    for (std::size_t i = span.begin; i < span.end; ++i) {
        if (!out.empty()) out.push_back(' ');
        out += s[i].lemma;
    }
    return out;
}

/// Lemma sequence of a free-text phrase, space joined.
inline std::string normalize_phrase(std::string_view phrase, const Analyzer& analyzer = Analyzer::default_instance()) {
    std::string out;
    for (const auto& s : analyzer.analyze(phrase))
        for (const auto& t : s) {
            if (!is_word(t)) continue;
            if (!out.empty()) out.push_back(' ');
            out += t.pos == Pos::Verb ? analyzer.noun_lemma(to_lower(t.surface)) : t.lemma;
        }
    return out;
}

} // namespace tracefacts
