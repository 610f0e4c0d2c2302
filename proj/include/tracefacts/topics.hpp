#pragma once

#include "tracefacts/corpus.hpp"
#include "tracefacts/error.hpp"
#include "tracefacts/project.hpp"
#include "tracefacts/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tracefacts {

inline constexpr std::size_t kDefaultTopics = 50;
inline constexpr std::size_t kDefaultGibbsIterations = 1000;
inline constexpr double kDefaultBeta = 0.01;
inline constexpr std::size_t kTopTermsPerTopic = 20;

struct LdaParams {
    std::size_t k = kDefaultTopics;
    std::size_t iterations = kDefaultGibbsIterations;
    double alpha = 50.0 / static_cast<double>(kDefaultTopics);
    double beta = kDefaultBeta;
    std::uint64_t seed = 42;
};

enum class TermVectorMode { Full, TopTruncated };

class TopicModel {
public:
    TopicModel() = default;

    std::size_t k() const { return k_; }
    const std::vector<std::string>& vocab() const { return vocab_; }
    const std::vector<std::vector<double>>& phi() const { return phi_; }
    const std::vector<std::vector<double>>& theta() const { return theta_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t iterations() const { return iterations_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    std::optional<std::size_t> word_id(const std::string& w) const {
        auto it = ids_.find(w);
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    /// The n most probable vocabulary entries of a topic; ties break lexicographically.
    std::vector<std::pair<std::string, double>> top_terms(std::size_t topic, std::size_t n = kTopTermsPerTopic) const {
        if (topic >= k_) throw ValidationError("topic index " + std::to_string(topic) + " out of range (k=" + std::to_string(k_) + ")");
        std::vector<std::size_t> order(vocab_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        const auto& row = phi_[topic];
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (row[a] != row[b]) return row[a] > row[b];
            return vocab_[a] < vocab_[b];
        });
        if (order.size() > n) order.resize(n);
        std::vector<std::pair<std::string, double>> out;
        for (auto w : order) out.emplace_back(vocab_[w], row[w]);
        return out;
    }

    /// Topic-space vector of a term; multiword terms missing from the vocabulary
    /// average their constituent word vectors.
    std::vector<double> term_vector(const std::string& term, TermVectorMode mode = TermVectorMode::Full) const {
        std::vector<double> v(k_, 0.0);
        if (auto id = word_id(term)) {
            fill(v, *id, mode, 1.0);
            return v;
        }
        std::istringstream in(term);
        std::vector<std::size_t> parts;
        std::size_t words = 0;
        for (std::string w; in >> w; ++words)
            if (auto id = word_id(w)) parts.push_back(*id);
        if (words < 2 || parts.empty()) return v;
        for (auto id : parts) fill(v, id, mode, 1.0 / static_cast<double>(words));
        return v;
    }

    double tm_score(const std::string& a, const std::string& b, TermVectorMode mode = TermVectorMode::Full) const {
        const auto va = term_vector(a, mode);
        const auto vb = term_vector(b, mode);
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t j = 0; j < k_; ++j) {
            dot += va[j] * vb[j];
            na += va[j] * va[j];
            nb += vb[j] * vb[j];
        }
        if (na == 0.0 || nb == 0.0) return 0.0;
        return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
    }

    nlohmann::json to_json() const {
        return {{"k", k_}, {"vocab", vocab_}, {"phi", phi_}, {"seed", seed_},
                {"iterations", iterations_}, {"alpha", alpha_}, {"beta", beta_}};
    }

    static TopicModel from_json(const nlohmann::json& j) {
        TopicModel m;
        try {
            m.k_ = j.at("k").get<std::size_t>();
            m.vocab_ = j.at("vocab").get<std::vector<std::string>>();
            m.phi_ = j.at("phi").get<std::vector<std::vector<double>>>();
            m.seed_ = j.at("seed").get<std::uint64_t>();
            m.iterations_ = j.at("iterations").get<std::size_t>();
            m.alpha_ = j.at("alpha").get<double>();
            m.beta_ = j.at("beta").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("malformed topic model: ") + e.what());
        }
        if (m.phi_.size() != m.k_) throw ValidationError("topic model phi has wrong row count");
        for (const auto& row : m.phi_)
            if (row.size() != m.vocab_.size()) throw ValidationError("topic model phi row has wrong width");
        m.reindex();
        return m;
    }

private:
    friend TopicModel train_lda(const std::vector<std::vector<std::string>>&, const LdaParams&);

    void fill(std::vector<double>& v, std::size_t id, TermVectorMode mode, double weight) const {
        for (std::size_t j = 0; j < k_; ++j) {
            if (mode == TermVectorMode::TopTruncated && !in_top_[j][id]) continue;
            v[j] += weight * phi_[j][id];
        }
    }

    void reindex() {
        ids_.clear();
        for (std::size_t i = 0; i < vocab_.size(); ++i) ids_.emplace(vocab_[i], i);
        in_top_.assign(k_, std::vector<bool>(vocab_.size(), false));
        for (std::size_t j = 0; j < k_; ++j)
            for (const auto& [w, p] : top_terms(j)) in_top_[j][ids_.at(w)] = true;
    }

    std::size_t k_ = 0;
    std::vector<std::string> vocab_;
    std::vector<std::vector<double>> phi_;
    std::vector<std::vector<double>> theta_;
    std::uint64_t seed_ = 0;
    std::size_t iterations_ = 0;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    std::unordered_map<std::string, std::size_t> ids_;
    std::vector<std::vector<bool>> in_top_;
};

/// Collapsed Gibbs sampling for LDA; deterministic for a given seed.
inline TopicModel train_lda(const std::vector<std::vector<std::string>>& docs, const LdaParams& params) {
    if (params.k < 2) throw ValidationError("LDA needs k >= 2");
    if (params.alpha <= 0 || params.beta <= 0) throw ValidationError("LDA hyperparameters must be positive");
    std::map<std::string, std::size_t> vocab_index;
    for (const auto& d : docs)
        for (const auto& w : d) vocab_index.emplace(w, 0);
    if (vocab_index.empty()) throw ValidationError("empty corpus: no tokens to train on");

    TopicModel m;
    m.k_ = params.k;
    m.seed_ = params.seed;
    m.iterations_ = params.iterations;
    m.alpha_ = params.alpha;
    m.beta_ = params.beta;
    for (auto& [w, id] : vocab_index) {
        id = m.vocab_.size();
        m.vocab_.push_back(w);
    }
    const std::size_t K = params.k, V = m.vocab_.size(), D = docs.size();
    std::vector<std::vector<std::uint32_t>> words(D), z(D);
    std::vector<std::uint32_t> n_kw(K * V, 0), n_k(K, 0), n_dk(D * K, 0);
    SplitMix64 rng(params.seed);
    for (std::size_t d = 0; d < D; ++d) {
        for (const auto& w : docs[d]) {
            const auto wid = static_cast<std::uint32_t>(vocab_index.at(w));
            const auto topic = static_cast<std::uint32_t>(rng.below(K));
            words[d].push_back(wid);
            z[d].push_back(topic);
            ++n_kw[topic * V + wid];
            ++n_k[topic];
            ++n_dk[d * K + topic];
        }
    }
    const double vbeta = static_cast<double>(V) * params.beta;
    std::vector<double> cdf(K);
    for (std::size_t it = 0; it < params.iterations; ++it) {
        for (std::size_t d = 0; d < D; ++d) {
            for (std::size_t i = 0; i < words[d].size(); ++i) {
                const std::uint32_t w = words[d][i];
                std::uint32_t t = z[d][i];
                --n_kw[t * V + w];
                --n_k[t];
                --n_dk[d * K + t];
                double total = 0.0;
                for (std::size_t j = 0; j < K; ++j) {
                    total += (n_dk[d * K + j] + params.alpha) * (n_kw[j * V + w] + params.beta) / (n_k[j] + vbeta);
                    cdf[j] = total;
                }
                const double u = rng.uniform() * total;
                t = static_cast<std::uint32_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
                if (t >= K) t = static_cast<std::uint32_t>(K - 1);
                z[d][i] = t;
                ++n_kw[t * V + w];
                ++n_k[t];
                ++n_dk[d * K + t];
            }
        }
    }
    m.phi_.assign(K, std::vector<double>(V));
    for (std::size_t j = 0; j < K; ++j) {
        double sum = 0.0;
        for (std::size_t w = 0; w < V; ++w) sum += m.phi_[j][w] = (n_kw[j * V + w] + params.beta) / (n_k[j] + vbeta);
        for (auto& x : m.phi_[j]) x /= sum;
    }
    m.theta_.assign(D, std::vector<double>(K));
    for (std::size_t d = 0; d < D; ++d) {
        double sum = 0.0;
        const double len = static_cast<double>(words[d].size());
        for (std::size_t j = 0; j < K; ++j)
            sum += m.theta_[d][j] = (n_dk[d * K + j] + params.alpha) / (len + static_cast<double>(K) * params.alpha);
        for (auto& x : m.theta_[d]) x /= sum;
    }
    m.reindex();
    return m;
}

/// Training documents: content-word lemmas with multiword domain terms merged into one token.
inline std::vector<std::string> lda_tokens(const std::vector<Sentence>& sentences, const CorpusStats& corpus) {
    std::vector<std::string> out;
    for (const auto& s : sentences) {
        const auto spans = corpus.find_spans(s);
        std::size_t next = 0;
        for (std::size_t i = 0; i < s.size();) {
            if (next < spans.size() && spans[next].span.begin == i) {
                out.push_back(spans[next].term);
                i = spans[next].span.end;
                ++next;
                continue;
            }
            const Token& t = s[i++];
            if (!is_word(t) || is_stopword(t.lemma)) continue;
            if (t.pos == Pos::Noun || t.pos == Pos::Adj || (t.pos == Pos::Verb && !is_auxiliary(to_lower(t.surface))))
                out.push_back(t.lemma);
        }
    }
    return out;
}

inline std::vector<std::vector<std::string>> lda_documents(const Project& project, const std::vector<Document>& domain_docs,
                                                           const CorpusStats& corpus) {
    std::vector<std::vector<std::string>> docs;
    for (const auto& d : domain_docs) docs.push_back(lda_tokens(d.sentences, corpus));
    for (const auto& a : project.artifacts()) docs.push_back(lda_tokens(a.sentences, corpus));
    return docs;
}

} // namespace tracefacts
