#pragma once

#include "tracefacts/fusion.hpp"
#include "tracefacts/project.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace testsupport {

namespace fs = std::filesystem;
using tracefacts::SemScore;
using tracefacts::SynEvidence;
using tracefacts::TraceLink;

inline fs::path data_dir() { return TRACEFACTS_TEST_DATA; }
inline fs::path toy_wordnet() { return data_dir() / "wordnet-toy"; }
inline fs::path mini_wordnet() { return data_dir() / "wordnet-mini"; }

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = fs::temp_directory_path() /
                ("tracefacts-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

/// Evidence looked up from hand-planted tables; unlisted pairs score zero.
struct PlantedEvidence {
    struct Pair {
        double tm = 0.0;
        SemScore sem;
        double arm = 0.0;
        std::optional<SynEvidence> syn;
    };
    std::map<std::pair<std::string, std::string>, Pair> pairs;
    std::map<std::string, double> ds_values;

    const Pair* find(const std::string& s, const std::string& t) const {
        if (auto it = pairs.find({s, t}); it != pairs.end()) return &it->second;
        return nullptr;
    }
    std::optional<SynEvidence> syn(const TraceLink&, const std::string& s, const std::string& t) const {
        const Pair* p = find(s, t);
        return p ? p->syn : std::nullopt;
    }
    SemScore sem(const std::string& s, const std::string& t) const {
        const Pair* p = find(s, t);
        return p ? p->sem : SemScore{};
    }
    double arm(const std::string& s, const std::string& t) const {
        const Pair* p = find(s, t);
        return p ? p->arm : 0.0;
    }
    double tm(const std::string& s, const std::string& t) const {
        const Pair* p = find(s, t);
        return p ? p->tm : 0.0;
    }
    double ds(const std::string& term) const {
        auto it = ds_values.find(term);
        return it == ds_values.end() ? 0.0 : it->second;
    }
};

static_assert(tracefacts::EvidenceSource<PlantedEvidence>);

/// The start-button link: design D1 (source) traced to requirement R1 (target),
/// with evidence planted so the ranked output has the known seven rows.
struct D1R1 {
    TraceLink link{"L1", "D1", "R1", std::nullopt};
    std::vector<std::string> source_terms{"pca pump", "start button"};
    std::vector<std::string> target_terms{"control panel", "touch panel", "speaker", "clinician",
                                          "configuration", "alarm", "warning"};
    PlantedEvidence evidence;

    D1R1() {
        auto& p = evidence.pairs;
        SynEvidence press;
        press.left_term = "clinician";
        press.right_term = "start button";
        press.relation_label = "press of";
        press.reversed = true;
        press.technique = tracefacts::SynTechnique::Grammatical;
        p[{"start button", "clinician"}] = {0.3, {0.4, 0.35}, 0.0, press};
        p[{"pca pump", "touch panel"}] = {0.6, {0.6, 0.5}, 0.7, std::nullopt};
        p[{"pca pump", "control panel"}] = {0.7, {0.6, 0.55}, 0.2, std::nullopt};
        p[{"pca pump", "alarm"}] = {0.6, {0.55, 0.3}, 0.1, std::nullopt};
        p[{"pca pump", "clinician"}] = {0.55, {0.6, 0.2}, 0.0, std::nullopt};
        p[{"start button", "touch panel"}] = {0.3, {0.3, 0.25}, 0.4, std::nullopt};
        p[{"start button", "control panel"}] = {0.3, {0.3, 0.2}, 0.2, std::nullopt};
        // the rest fail the topic or semantic filter
        p[{"start button", "alarm"}] = {0.05, {0.6, 0.6}, 0.0, std::nullopt};
        p[{"pca pump", "speaker"}] = {0.4, {0.1, 0.15}, 0.3, std::nullopt};
        p[{"pca pump", "configuration"}] = {0.02, {0.1, 0.1}, 0.0, std::nullopt};
        p[{"start button", "speaker"}] = {0.0, {0.5, 0.5}, 0.0, std::nullopt};
        evidence.ds_values = {{"pca pump", 2.1}, {"start button", 1.8}, {"control panel", 1.7}, {"touch panel", 1.9},
                              {"alarm", 1.6}, {"clinician", 1.2}, {"speaker", 0.9}, {"configuration", 0.4},
                              {"warning", 0.3}};
    }
};

struct ExpectedRow {
    std::string source;
    std::string target;
    std::string relation;  // empty when unlabeled
    double conf;
};

inline const std::vector<ExpectedRow>& start_button_ranking() {
    static const std::vector<ExpectedRow> rows = {
        {"start button", "clinician", "press of (Reverse)", 0.9},
        {"pca pump", "touch panel", "", 0.6},
        {"pca pump", "control panel", "", 0.5},
        {"pca pump", "alarm", "", 0.5},
        {"pca pump", "clinician", "", 0.4},
        {"start button", "touch panel", "", 0.1},
        {"start button", "control panel", "", 0.1},
    };
    return rows;
}

struct LspSample {
    std::string sentence;
    std::string left;
    std::string relation;
    std::string right;
};

/// The four pattern examples with the facts they must yield.
inline const std::vector<LspSample>& lsp_samples() {
    static const std::vector<LspSample> rows = {
        {"Infusion pumps are used in hospitals and other healthcare settings worldwide.", "hospital", "is-subclass-of",
         "healthcare setting"},
        {"... focused on how to compute ROI for medical IT systems such as EHRs.", "medical it system", "is-superclass-of",
         "ehr"},
        {"Audio speaker is located on the the rear of the pump.", "audio speaker", "is-part-of", "rear of the pump"},
        {"Each profile contains instrument configurations appropriate for the care area.", "profile", "has-part",
         "instrument configuration"},
    };
    return rows;
}

inline std::vector<std::string> lsp_distractors() {
    std::ifstream in(data_dir() / "lsp_distractors.txt");
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

/// A two-link pump project wired to the miniature WordNet with a tiny topic model.
inline void write_mini_project(const fs::path& dir) {
    write_file(dir / "artifacts.jsonl",
               R"({"id":"D1","kind":"design","text":"The PCA pump shall have a start button. The clinician's press of the start button starts the infusion."})"
               "\n"
               R"({"id":"R1","kind":"requirement","text":"The clinician shall press the start button on the touch panel of the PCA pump."})"
               "\n"
               R"({"id":"D2","kind":"design","text":"The PCA pump includes a drug reservoir."})"
               "\n"
               R"({"id":"R2","kind":"requirement","text":"The drug reservoir contains the liquid drug. The pump raises an alarm when the drug reservoir is empty."})"
               "\n");
    write_file(dir / "links.jsonl",
               R"({"id":"L1","source":"D1","target":"R1"})"
               "\n"
               R"({"id":"L2","source":"D2","target":"R2"})"
               "\n");
    write_file(dir / "domain/pumps.txt",
               "An infusion pump delivers the liquid drug from the drug reservoir. The PCA pump has a touch panel. "
               "The clinician programs the pump on the touch panel. The pump raises an alarm when the reservoir is empty. "
               "The start button starts the infusion.");
    std::string general;
    for (const char* s : {"The weather report mentioned rain in the valley.", "The city council approved the school budget.",
                          "A new coffee shop opened near the train station.", "The football team won the league title.",
                          "Local farmers sold apples at the market square.", "The museum exhibit drew large crowds.",
                          "The mayor gave a speech about road repairs.", "Students planted trees along the river bank.",
                          "The bakery sells bread and cake every morning.", "The library hosts a book club on Friday."})
        general += std::string(s) + " ";
    write_file(dir / "general/news.txt", general + general + general);
    nlohmann::json cfg{{"topics", {{"k", 2}, {"iterations", 30}, {"seed", 7}}}, {"wordnet", mini_wordnet().string()}};
    write_file(dir / "tracefacts.json", cfg.dump(2));
}

inline const char* kDrugLibrarySentence =
    "The drug library thread stores the drug library provided by the hospital pharmacy and retrieves the drug record "
    "corresponding to the liquid drug loaded into the drug reservoir.";

inline const std::vector<std::string>& drug_library_terms() {
    static const std::vector<std::string> terms = {"drug library thread", "drug library", "drug record", "liquid drug",
                                                   "drug reservoir"};
    return terms;
}

} // namespace testsupport
