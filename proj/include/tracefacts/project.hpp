#pragma once

#include "tracefacts/error.hpp"
#include "tracefacts/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace tracefacts {

enum class ArtifactKind { Requirement, Design, Regulation, Component, Other };

inline std::string_view to_string(ArtifactKind k) {
    switch (k) {
    case ArtifactKind::Requirement: return "requirement";
    case ArtifactKind::Design: return "design";
    case ArtifactKind::Regulation: return "regulation";
    case ArtifactKind::Component: return "component";
    case ArtifactKind::Other: return "other";
    }
    return "other";
}

inline ArtifactKind artifact_kind_from(std::string_view s) {
    const std::string k = to_lower(s);
    if (k == "requirement") return ArtifactKind::Requirement;
    if (k == "design") return ArtifactKind::Design;
    if (k == "regulation") return ArtifactKind::Regulation;
    if (k == "component") return ArtifactKind::Component;
    return ArtifactKind::Other;
}

struct Artifact {
    std::string id;
    ArtifactKind kind = ArtifactKind::Other;
    std::string text;
    std::vector<Sentence> sentences;
};

struct TraceLink {
    std::string id;
    std::string source_id;
    std::string target_id;
    std::optional<std::string> label;
};

/// Loaded artifacts and the trace links between them.
class Project {
public:
    Project() = default;

    /// Adds an artifact, analyzing its text. Throws on duplicate id or empty text.
    void add_artifact(std::string id, ArtifactKind kind, std::string text,
                      const Analyzer& analyzer = Analyzer::default_instance()) {
        if (id.empty()) throw ValidationError("artifact id is empty");
        if (text.empty()) throw ValidationError("artifact " + id + " has empty text");
        if (index_.count(id)) throw ValidationError("duplicate artifact id " + id);
        Artifact a{std::move(id), kind, std::move(text), {}};
        a.sentences = analyzer.analyze(a.text);
        index_.emplace(a.id, artifacts_.size());
        artifacts_.push_back(std::move(a));
    }

    /// Adds links; all dangling endpoints are reported together.
    void add_links(std::vector<TraceLink> links) {
        std::vector<std::string> bad_links, missing;
        for (const auto& l : links) {
            bool bad = false;
            for (const auto* end : {&l.source_id, &l.target_id}) {
                if (!index_.count(*end)) {
                    bad = true;
                    if (std::find(missing.begin(), missing.end(), *end) == missing.end()) missing.push_back(*end);
                }
            }
            if (bad) bad_links.push_back(l.id);
        }
        if (!bad_links.empty()) throw DanglingReferenceError(bad_links, missing);
        for (auto& l : links) {
            if (l.source_id == l.target_id) throw ValidationError("trace link " + l.id + " links an artifact to itself");
            if (link_index_.count(l.id)) throw ValidationError("duplicate trace link id " + l.id);
            link_index_.emplace(l.id, links_.size());
            links_.push_back(std::move(l));
        }
    }

    const std::vector<Artifact>& artifacts() const { return artifacts_; }
    const std::vector<TraceLink>& links() const { return links_; }

    const Artifact& artifact(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw NotFoundError("unknown artifact " + id);
        return artifacts_[it->second];
    }
    const TraceLink& link(const std::string& id) const {
        auto it = link_index_.find(id);
        if (it == link_index_.end()) throw NotFoundError("unknown trace link " + id);
        return links_[it->second];
    }
    bool has_link(const std::string& id) const { return link_index_.count(id) != 0; }

    nlohmann::json summary() const {
        std::map<std::string, std::size_t> by_kind;
        for (const auto& a : artifacts_) ++by_kind[std::string(to_string(a.kind))];
        nlohmann::json j;
        j["artifacts"] = artifacts_.size();
        j["links"] = links_.size();
        j["artifacts_by_kind"] = by_kind;
        return j;
    }

private:
    std::vector<Artifact> artifacts_;
    std::vector<TraceLink> links_;
    std::unordered_map<std::string, std::size_t> index_;
    std::unordered_map<std::string, std::size_t> link_index_;
};

namespace detail {

inline std::string required_string(const nlohmann::json& obj, const char* key, const std::string& file,
                                   std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) throw ParseError(file, line, std::string("missing string field \"") + key + "\"");
    return it->get<std::string>();
}

// Splits one CSV record; handles double-quoted fields.
inline std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        auto b = f.find_first_not_of(" \t");
        auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

template <class F>
void for_each_jsonl(const std::filesystem::path& path, F&& f) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open file");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path.string(), lineno, e.what());
        }
        if (!obj.is_object()) throw ParseError(path.string(), lineno, "expected a JSON object");
        f(obj, lineno);
    }
}

} // namespace detail

inline std::vector<TraceLink> read_links(const std::filesystem::path& path) {
    std::vector<TraceLink> links;
    const std::string file = path.string();
    if (to_lower(path.extension().string()) == ".csv") {
        std::ifstream in(path);
        if (!in) throw IoError(file, "cannot open file");
        std::string line;
        std::size_t lineno = 0;
        std::optional<std::array<std::size_t, 3>> cols;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            auto fields = detail::csv_fields(line);
            if (!cols) {
                std::array<std::size_t, 3> c{};
                const char* names[] = {"id", "source", "target"};
                for (std::size_t k = 0; k < 3; ++k) {
                    auto it = std::find(fields.begin(), fields.end(), names[k]);
                    if (it == fields.end()) throw ParseError(file, lineno, std::string("CSV header lacks column ") + names[k]);
                    c[k] = static_cast<std::size_t>(it - fields.begin());
                }
                cols = c;
                continue;
            }
            const std::size_t need = std::max({(*cols)[0], (*cols)[1], (*cols)[2]});
            if (fields.size() <= need) throw ParseError(file, lineno, "too few CSV fields");
            links.push_back({fields[(*cols)[0]], fields[(*cols)[1]], fields[(*cols)[2]], std::nullopt});
        }
        return links;
    }
    detail::for_each_jsonl(path, [&](const nlohmann::json& obj, std::size_t lineno) {
        TraceLink l;
        l.id = detail::required_string(obj, "id", file, lineno);
        l.source_id = detail::required_string(obj, "source", file, lineno);
        l.target_id = detail::required_string(obj, "target", file, lineno);
        if (auto it = obj.find("label"); it != obj.end() && it->is_string()) l.label = it->get<std::string>();
        links.push_back(std::move(l));
    });
    return links;
}

/// Loads artifacts (JSON Lines) and trace links (JSON Lines or CSV).
inline Project ingest_project(const std::filesystem::path& artifact_file, const std::filesystem::path& link_file,
                              const Analyzer& analyzer = Analyzer::default_instance()) {
    Project project;
    const std::string file = artifact_file.string();
    detail::for_each_jsonl(artifact_file, [&](const nlohmann::json& obj, std::size_t lineno) {
        std::string id = detail::required_string(obj, "id", file, lineno);
        std::string text = detail::required_string(obj, "text", file, lineno);
        ArtifactKind kind = ArtifactKind::Other;
        if (auto it = obj.find("kind"); it != obj.end() && it->is_string()) kind = artifact_kind_from(it->get<std::string>());
        try {
            project.add_artifact(std::move(id), kind, std::move(text), analyzer);
        } catch (const ValidationError& e) {
            throw ParseError(file, lineno, e.what());
        }
    });
    project.add_links(read_links(link_file));
    return project;
}

} // namespace tracefacts
