#pragma once

#include "tracefacts/error.hpp"
#include "tracefacts/project.hpp"
#include "tracefacts/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tracefacts {

inline constexpr std::size_t kMaxTermTokens = 4;
inline constexpr double kDefaultThreshold = 1.0;
// Stand-in general-corpus frequency for terms the general corpus never uses.
inline constexpr double kAbsentGeneralFrequency = 0.5;

struct Term {
    std::string text;  // space-joined lemmas
    std::string head;  // lemma of the final noun
    std::uint64_t freq_domain = 0;
    std::uint64_t freq_general = 0;
    double ds = 0.0;
    bool is_domain_specific = false;

    std::vector<std::string> words() const {
        std::vector<std::string> out;
        std::istringstream in(text);
        for (std::string w; in >> w;) out.push_back(w);
        return out;
    }
};

/// Log ratio of normalized domain frequency to normalized general frequency.
inline double domain_specificity(double freq_domain, double total_domain, double freq_general, double total_general) {
    const double general = freq_general > 0 ? freq_general : kAbsentGeneralFrequency;
    return std::log((freq_domain / total_domain) / (general / total_general));
}

struct Document {
    std::string path;
    std::vector<Sentence> sentences;
};

using TermCounts = std::map<std::string, std::uint64_t>;

/// Adds every (ADJ|NOUN)* NOUN n-gram of 1..4 tokens inside each adjective/noun run.
inline void count_terms(const Sentence& s, TermCounts& into) {
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i].pos != Pos::Noun && s[i].pos != Pos::Adj) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && (s[j].pos == Pos::Noun || s[j].pos == Pos::Adj)) ++j;
        for (std::size_t end = i + 1; end <= j; ++end) {
            if (s[end - 1].pos != Pos::Noun) continue;
            const std::size_t lo = end > kMaxTermTokens ? std::max(i, end - kMaxTermTokens) : i;
            for (std::size_t begin = end; begin-- > lo;) ++into[join_lemmas(s, {begin, end})];
        }
        i = j;
    }
}

struct TermSpan {
    Span span;
    std::string term;
};

/// Term frequencies over the domain and general corpora plus the selected domain-specific set.
class CorpusStats {
public:
    CorpusStats() = default;

    /// Terms absent from the domain counts are discarded.
    static CorpusStats build(const TermCounts& domain, const TermCounts& general, double threshold = kDefaultThreshold) {
        CorpusStats st;
        st.threshold_ = threshold;
        for (const auto& [t, c] : domain) st.total_domain_ += c;
        for (const auto& [t, c] : general) st.total_general_ += c;
        for (const auto& [text, fd] : domain) {
            if (fd == 0) continue;
            Term term;
            term.text = text;
            const auto sp = text.rfind(' ');
            term.head = sp == std::string::npos ? text : text.substr(sp + 1);
            term.freq_domain = fd;
            auto g = general.find(text);
            term.freq_general = g == general.end() ? 0 : g->second;
            term.ds = domain_specificity(static_cast<double>(fd), static_cast<double>(st.total_domain_),
                                         static_cast<double>(term.freq_general),
                                         static_cast<double>(st.total_general_ == 0 ? 1 : st.total_general_));
            term.is_domain_specific = term.ds >= threshold;
            st.terms_.emplace(text, std::move(term));
        }
        st.reindex();
        return st;
    }

    std::uint64_t total_domain_terms() const { return total_domain_; }
    std::uint64_t total_general_terms() const { return total_general_; }
    double threshold() const { return threshold_; }
    const std::map<std::string, Term>& terms() const { return terms_; }

    const Term* find(const std::string& text) const {
        auto it = terms_.find(text);
        return it == terms_.end() ? nullptr : &it->second;
    }

    bool is_domain_specific(const std::string& text) const { return domain_specific_.count(text) != 0; }
    std::size_t domain_specific_count() const { return domain_specific_.size(); }

    /// Leftmost-longest matches of domain-specific terms over the sentence's lemmas.
    std::vector<TermSpan> find_spans(const Sentence& s) const {
        std::vector<TermSpan> out;
        std::size_t i = 0;
        while (i < s.size()) {
            bool hit = false;
            if (is_word(s[i])) {
                const std::size_t max_n = std::min(kMaxTermTokens, s.size() - i);
                for (std::size_t n = max_n; n >= 1; --n) {
                    if (s[i + n - 1].pos != Pos::Noun) continue;  // a verb sharing a term's lemma is not a mention
                    std::string cand = join_lemmas(s, {i, i + n});
                    if (domain_specific_.count(cand)) {
                        out.push_back({{i, i + n}, std::move(cand)});
                        i += n;
                        hit = true;
                        break;
                    }
                }
            }
            if (!hit) ++i;
        }
        return out;
    }

    /// Domain-specific terms of an artifact in order of first occurrence.
    std::vector<Term> domain_terms_in(const Artifact& artifact) const { return domain_terms_in(artifact.sentences); }

    std::vector<Term> domain_terms_in(const std::vector<Sentence>& sentences) const {
        std::vector<Term> out;
        std::unordered_set<std::string> seen;
        for (const auto& s : sentences)
            for (auto& ts : find_spans(s))
                if (seen.insert(ts.term).second) out.push_back(terms_.at(ts.term));
        return out;
    }

    // Content-word lemma counts (domain documents and artifacts) feeding information content.
    TermCounts noun_counts;
    TermCounts verb_counts;

    nlohmann::json to_json() const {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& [text, t] : terms_) {
            terms.push_back({{"text", t.text},
                             {"head", t.head},
                             {"freq_domain", t.freq_domain},
                             {"freq_general", t.freq_general},
                             {"ds", t.ds},
                             {"is_domain_specific", t.is_domain_specific}});
        }
        return {{"threshold", threshold_},
                {"total_domain_terms", total_domain_},
                {"total_general_terms", total_general_},
                {"domain_specific_terms", domain_specific_.size()},
                {"terms", std::move(terms)},
                {"noun_counts", noun_counts},
                {"verb_counts", verb_counts}};
    }

    static CorpusStats from_json(const nlohmann::json& j) {
        CorpusStats st;
        st.threshold_ = j.at("threshold").get<double>();
        st.total_domain_ = j.at("total_domain_terms").get<std::uint64_t>();
        st.total_general_ = j.at("total_general_terms").get<std::uint64_t>();
        for (const auto& tj : j.at("terms")) {
            Term t;
            t.text = tj.at("text").get<std::string>();
            t.head = tj.at("head").get<std::string>();
            t.freq_domain = tj.at("freq_domain").get<std::uint64_t>();
            t.freq_general = tj.at("freq_general").get<std::uint64_t>();
            t.ds = tj.at("ds").get<double>();
            t.is_domain_specific = tj.at("is_domain_specific").get<bool>();
            st.terms_.emplace(t.text, std::move(t));
        }
        if (j.contains("noun_counts")) st.noun_counts = j.at("noun_counts").get<TermCounts>();
        if (j.contains("verb_counts")) st.verb_counts = j.at("verb_counts").get<TermCounts>();
        st.reindex();
        return st;
    }

private:
    void reindex() {
        domain_specific_.clear();
        for (const auto& [text, t] : terms_)
            if (t.is_domain_specific) domain_specific_.insert(text);
    }

    std::uint64_t total_domain_ = 0;
    std::uint64_t total_general_ = 0;
    double threshold_ = kDefaultThreshold;
    std::map<std::string, Term> terms_;
    std::unordered_set<std::string> domain_specific_;
};

/// Recursively loads *.txt files under dir, sorted by path.
inline std::vector<Document> load_corpus_dir(const std::filesystem::path& dir,
                                             const Analyzer& analyzer = Analyzer::default_instance()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError(dir.string(), "corpus directory does not exist");
    std::vector<fs::path> files;
    for (fs::recursive_directory_iterator it(dir, ec), end; it != end; it.increment(ec)) {
        if (ec) throw IoError(dir.string(), ec.message());
        if (it->is_regular_file() && to_lower(it->path().extension().string()) == ".txt") files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Document> docs;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw IoError(f.string(), "cannot read corpus file");
        std::ostringstream buf;
        buf << in.rdbuf();
        docs.push_back({f.string(), analyzer.analyze(buf.str())});
    }
    if (docs.empty()) throw ValidationError("empty corpus: no .txt files under " + dir.string());
    return docs;
}

namespace detail {

inline void count_content_words(const std::vector<Sentence>& sentences, TermCounts& nouns, TermCounts& verbs) {
    for (const auto& s : sentences)
        for (const auto& t : s) {
            if (t.pos == Pos::Noun) ++nouns[t.lemma];
            else if (t.pos == Pos::Verb && !is_auxiliary(to_lower(t.surface))) ++verbs[t.lemma];
        }
}

} // namespace detail

/// Counts terms in the domain corpus (domain documents plus project artifacts)
/// and the general corpus, then scores domain specificity.
inline CorpusStats extract_terms(const Project& project, const std::vector<Document>& domain_docs,
                                 const std::vector<Document>& general_docs, double threshold = kDefaultThreshold) {
    if (domain_docs.empty()) throw ValidationError("empty corpus: no domain documents");
    if (general_docs.empty()) throw ValidationError("empty corpus: no general documents");
    TermCounts domain, general, nouns, verbs;
    for (const auto& d : domain_docs) {
        for (const auto& s : d.sentences) count_terms(s, domain);
        detail::count_content_words(d.sentences, nouns, verbs);
    }
    for (const auto& a : project.artifacts()) {
        for (const auto& s : a.sentences) count_terms(s, domain);
        detail::count_content_words(a.sentences, nouns, verbs);
    }
    for (const auto& d : general_docs)
        for (const auto& s : d.sentences) count_terms(s, general);
    if (domain.empty()) throw ValidationError("empty corpus: domain corpus contains no terms");
    if (general.empty()) throw ValidationError("empty corpus: general corpus contains no terms");
    CorpusStats st = CorpusStats::build(domain, general, threshold);
    st.noun_counts = std::move(nouns);
    st.verb_counts = std::move(verbs);
    return st;
}

inline CorpusStats extract_terms(const Project& project, const std::filesystem::path& domain_dir,
                                 const std::filesystem::path& general_dir, double threshold = kDefaultThreshold,
                                 const Analyzer& analyzer = Analyzer::default_instance()) {
    return extract_terms(project, load_corpus_dir(domain_dir, analyzer), load_corpus_dir(general_dir, analyzer),
                         threshold);
}

} // namespace tracefacts
