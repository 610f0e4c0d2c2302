#pragma once

#include "tracefacts/arm.hpp"
#include "tracefacts/corpus.hpp"
#include "tracefacts/error.hpp"
#include "tracefacts/eval.hpp"
#include "tracefacts/fusion.hpp"
#include "tracefacts/lexsyn.hpp"
#include "tracefacts/project.hpp"
#include "tracefacts/semrel.hpp"
#include "tracefacts/topics.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tracefacts {

/// Settings read from <project>/tracefacts.json; every key is optional.
struct MinerConfig {
    double ds_threshold = kDefaultThreshold;
    LdaParams lda;
    TermVectorMode tm_mode = TermVectorMode::Full;
    std::size_t min_cooccur = 1;
    std::optional<std::filesystem::path> rules_file;
    std::optional<std::filesystem::path> wordnet_dir;
    std::optional<std::filesystem::path> topic_model;

    static MinerConfig from_json(const nlohmann::json& j, const std::filesystem::path& base) {
        MinerConfig c;
        try {
            c.ds_threshold = j.value("ds_threshold", c.ds_threshold);
            if (auto t = j.find("topics"); t != j.end()) {
                c.lda.k = t->value("k", c.lda.k);
                c.lda.iterations = t->value("iterations", c.lda.iterations);
                c.lda.alpha = t->value("alpha", 50.0 / static_cast<double>(c.lda.k));
                c.lda.beta = t->value("beta", c.lda.beta);
                c.lda.seed = t->value("seed", c.lda.seed);
                const std::string mode = t->value("mode", "full");
                if (mode == "top20") c.tm_mode = TermVectorMode::TopTruncated;
                else if (mode != "full") throw ValidationError("unknown topics.mode " + mode);
                if (t->contains("model")) c.topic_model = base / t->at("model").get<std::string>();
            }
            if (auto a = j.find("arm"); a != j.end()) c.min_cooccur = a->value("min_cooccur", c.min_cooccur);
            if (j.contains("rules")) c.rules_file = base / j.at("rules").get<std::string>();
            if (j.contains("wordnet")) c.wordnet_dir = base / j.at("wordnet").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("malformed config: ") + e.what());
        }
        return c;
    }

    static MinerConfig load(const std::filesystem::path& project_dir) {
        const auto path = project_dir / "tracefacts.json";
        if (!std::filesystem::exists(path)) return {};
        std::ifstream in(path);
        if (!in) throw IoError(path.string(), "cannot read config");
        try {
            return from_json(nlohmann::json::parse(in), project_dir);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path.string(), 1, e.what());
        }
    }
};

/// All four evidence engines built for one project.
class Miner {
public:
    Miner(Project project, std::vector<Document> domain_docs, std::vector<Document> general_docs,
          std::unique_ptr<WordNet> wordnet, const MinerConfig& config, std::optional<TopicModel> topics = std::nullopt)
        : project_(std::move(project)), domain_docs_(std::move(domain_docs)), config_(config), wordnet_(std::move(wordnet)) {
        corpus_ = extract_terms(project_, domain_docs_, general_docs, config.ds_threshold);
        const auto rules = config.rules_file ? load_lsp_rules(*config.rules_file) : default_lsp_rules();
        syn_ = SynIndex(project_, corpus_, domain_docs_, rules);
        arm_ = std::make_unique<ArmIndex>(build_transactions(project_, corpus_), config.min_cooccur);
        topics_ = topics ? std::move(*topics) : train_lda(lda_documents(project_, domain_docs_, corpus_), config.lda);
        if (wordnet_) ic_ = std::make_unique<InformationContent>(*wordnet_, corpus_.noun_counts, corpus_.verb_counts);
    }

    Miner(const Miner&) = delete;
    Miner& operator=(const Miner&) = delete;

    const Project& project() const { return project_; }
    const CorpusStats& corpus() const { return corpus_; }
    const SynIndex& syn_index() const { return syn_; }
    const ArmIndex& arm_index() const { return *arm_; }
    const TopicModel& topic_model() const { return topics_; }
    const MinerConfig& config() const { return config_; }
    bool has_wordnet() const { return ic_ != nullptr; }

    // EvidenceSource
    std::optional<SynEvidence> syn(const TraceLink& link, const std::string& s, const std::string& t) const {
        return syn_.evidence_for_link(link, s, t);
    }
    SemScore sem(const std::string& s, const std::string& t) const { return ic_ ? sem_score(*ic_, s, t) : SemScore{}; }
    double arm(const std::string& s, const std::string& t) const { return arm_->score(s, t).cosine; }
    double tm(const std::string& s, const std::string& t) const { return topics_.tm_score(s, t, config_.tm_mode); }
    double ds(const std::string& term) const {
        const Term* t = corpus_.find(term);
        return t ? t->ds : 0.0;
    }

    std::vector<std::string> terms_of(const std::string& artifact_id) const {
        std::vector<std::string> out;
        for (const auto& t : corpus_.domain_terms_in(project_.artifact(artifact_id))) out.push_back(t.text);
        return out;
    }

    /// Unfiltered candidates with full evidence.
    std::vector<CandidateFact> candidates(const TraceLink& link) const {
        return generate_candidates(link, terms_of(link.source_id), terms_of(link.target_id), *this);
    }

    std::vector<CandidateFact> mine(const TraceLink& link, const ConfidenceScheme& scheme) const {
        return score_and_rank(filter_candidates(candidates(link), scheme), scheme);
    }

    CandidateLists all_candidates() const {
        CandidateLists out;
        for (const auto& l : project_.links()) out[l.id] = candidates(l);
        return out;
    }

private:
    Project project_;
    std::vector<Document> domain_docs_;
    MinerConfig config_;
    CorpusStats corpus_;
    SynIndex syn_;
    std::unique_ptr<ArmIndex> arm_;
    TopicModel topics_;
    std::unique_ptr<WordNet> wordnet_;
    std::unique_ptr<InformationContent> ic_;
};

static_assert(EvidenceSource<Miner>);

/// Locations inside a project directory.
struct ProjectLayout {
    std::filesystem::path dir;

    std::filesystem::path artifacts() const { return dir / "artifacts.jsonl"; }
    std::filesystem::path links() const {
        const auto jsonl = dir / "links.jsonl";
        return std::filesystem::exists(jsonl) || !std::filesystem::exists(dir / "links.csv") ? jsonl : dir / "links.csv";
    }
    std::filesystem::path domain() const { return dir / "domain"; }
    std::filesystem::path general() const { return dir / "general"; }
    std::filesystem::path store() const { return dir / "store"; }
    std::filesystem::path scheme() const { return dir / "scheme.json"; }
};

/// WordNet directory: explicit path, config entry, <project>/wordnet, then TRACEFACTS_WORDNET_DIR.
inline std::optional<std::filesystem::path> find_wordnet(const ProjectLayout& layout, const MinerConfig& config,
                                                         const std::optional<std::filesystem::path>& explicit_dir = {}) {
    if (explicit_dir) return explicit_dir;
    if (config.wordnet_dir) return config.wordnet_dir;
    if (std::filesystem::is_directory(layout.dir / "wordnet")) return layout.dir / "wordnet";
    if (const char* env = std::getenv("TRACEFACTS_WORDNET_DIR"); env && *env) return std::filesystem::path(env);
    return std::nullopt;
}

struct LoadOptions {
    std::optional<std::filesystem::path> wordnet_dir;
    bool require_wordnet = true;
    std::optional<LdaParams> lda;
};

/// Reads a project directory and builds every engine.
inline std::unique_ptr<Miner> load_miner(const std::filesystem::path& dir, const LoadOptions& opts = {}) {
    const ProjectLayout layout{dir};
    MinerConfig config = MinerConfig::load(dir);
    if (opts.lda) config.lda = *opts.lda;
    std::unique_ptr<WordNet> wn;
    const auto wn_dir = find_wordnet(layout, config, opts.wordnet_dir);
    if (wn_dir) {
        wn = std::make_unique<WordNet>(WordNet::load(*wn_dir));
    } else if (opts.require_wordnet) {
        throw IoError((layout.dir / "wordnet").string(),
                      "no WordNet directory found (use --wordnet, a \"wordnet\" config entry, or TRACEFACTS_WORDNET_DIR)");
    }
    Analyzer analyzer = wn_dir ? Analyzer::with_wordnet(*wn_dir) : Analyzer::default_instance();
    Project project = ingest_project(layout.artifacts(), layout.links(), analyzer);
    auto domain = load_corpus_dir(layout.domain(), analyzer);
    auto general = load_corpus_dir(layout.general(), analyzer);
    std::optional<TopicModel> topics;
    if (config.topic_model && std::filesystem::exists(*config.topic_model)) {
        std::ifstream in(*config.topic_model);
        try {
            topics = TopicModel::from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(config.topic_model->string(), 1, e.what());
        }
    }
    return std::make_unique<Miner>(std::move(project), std::move(domain), std::move(general), std::move(wn), config,
                                   std::move(topics));
}

inline ConfidenceScheme load_scheme_or_default(const std::optional<std::filesystem::path>& path) {
    return path ? ConfidenceScheme::load(*path) : ConfidenceScheme{};
}

} // namespace tracefacts
