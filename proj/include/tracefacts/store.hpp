#pragma once

#include "tracefacts/error.hpp"
#include "tracefacts/fact.hpp"

#include <json.hpp>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tracefacts {

using Clock = std::function<std::string()>;

/// UTC wall clock, ISO 8601 to the second.
inline std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

enum class DecisionAction { Accept, Reject, Modify };

inline std::string_view to_string(DecisionAction a) {
    switch (a) {
    case DecisionAction::Accept: return "accept";
    case DecisionAction::Reject: return "reject";
    case DecisionAction::Modify: return "modify";
    }
    return "accept";
}

inline DecisionAction decision_action_from(std::string_view s) {
    if (s == "accept") return DecisionAction::Accept;
    if (s == "reject") return DecisionAction::Reject;
    if (s == "modify") return DecisionAction::Modify;
    throw ValidationError("unknown decision action " + std::string(s));
}

struct Decision {
    DecisionAction action = DecisionAction::Accept;
    std::optional<std::string> relation;
    std::optional<std::string> source;
    std::optional<std::string> target;
    std::string editor;

    static Decision from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw ValidationError("decision must be a JSON object");
        Decision d;
        auto str = [&](const char* key) -> std::optional<std::string> {
            auto it = j.find(key);
            if (it == j.end() || it->is_null()) return std::nullopt;
            if (!it->is_string()) throw ValidationError(std::string("decision field ") + key + " must be a string");
            return it->get<std::string>();
        };
        const auto action = str("action");
        if (!action) throw ValidationError("decision lacks an action");
        d.action = decision_action_from(*action);
        d.relation = str("relation");
        d.source = str("source");
        d.target = str("target");
        d.editor = str("editor").value_or("");
        return d;
    }
};

namespace detail {

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(tmp.string(), "cannot write file");
        out << content;
        out.flush();
        if (!out) throw IoError(tmp.string(), "write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(path.string(), "rename failed: " + ec.message());
}

inline std::pair<std::string, std::string> unordered_key(const std::string& a, const std::string& b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

} // namespace detail

/// Vetted facts with an append-only audit log. When a directory is attached, every
/// change is persisted as ontology.json (atomic rename) plus audit.jsonl.
class FactStore {
public:
    explicit FactStore(Clock clock = utc_now) : clock_(std::move(clock)) {}

    /// Opens (or creates) a store directory; state is rebuilt by replaying the audit log.
    static FactStore open(const std::filesystem::path& dir, Clock clock = utc_now) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError(dir.string(), "cannot create store directory: " + ec.message());
        FactStore s(std::move(clock));
        const auto log = dir / "audit.jsonl";
        if (std::filesystem::exists(log)) {
            std::ifstream in(log);
            if (!in) throw IoError(log.string(), "cannot read audit log");
            std::string line;
            std::size_t lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                try {
                    s.apply(nlohmann::json::parse(line));
                } catch (const nlohmann::json::exception& e) {
                    throw ParseError(log.string(), lineno, e.what());
                }
                s.audit_.push_back(line);
            }
        }
        s.dir_ = dir;
        s.save_snapshot();
        return s;
    }

    /// Rebuilds a store from audit events alone.
    static FactStore replay(const std::vector<nlohmann::json>& events, Clock clock = utc_now) {
        FactStore s(std::move(clock));
        for (const auto& e : events) {
            s.apply(e);
            s.audit_.push_back(e.dump());
        }
        return s;
    }

    /// Registers a suggested fact. Existing ids keep their state; pairs previously
    /// rejected are refused (nullopt).
    std::optional<Fact> suggest(Fact f) {
        if (auto it = facts_.find(f.id); it != facts_.end()) return it->second;
        if (rejected_.count(detail::unordered_key(f.source, f.target))) return std::nullopt;
        f.status = FactStatus::Suggested;
        if (f.provenance.timestamp.empty()) f.provenance.timestamp = clock_();
        nlohmann::json ev{{"event", "suggest"}, {"fact", tracefacts::to_json(f)}};
        apply(ev);
        log(ev);
        return facts_.at(f.id);
    }

    bool is_rejected_pair(const std::string& a, const std::string& b) const {
        return rejected_.count(detail::unordered_key(a, b)) != 0;
    }

    /// Applies a vetting decision. Repeating an identical decision changes nothing.
    Fact record_decision(const std::string& fact_id, const Decision& d) {
        const Fact& current = get(fact_id);
        Fact next = decided(current, d, current.provenance.timestamp);
        if (next.status == current.status && next.source == current.source && next.target == current.target &&
            next.relation == current.relation && (d.editor.empty() || d.editor == current.provenance.editor))
            return current;
        nlohmann::json ev{{"event", "decision"},
                          {"fact_id", fact_id},
                          {"action", to_string(d.action)},
                          {"editor", d.editor},
                          {"timestamp", clock_()}};
        if (d.relation) ev["relation"] = *d.relation;
        if (d.source) ev["source"] = *d.source;
        if (d.target) ev["target"] = *d.target;
        apply(ev);
        log(ev);
        return facts_.at(fact_id);
    }

    const Fact& get(const std::string& fact_id) const {
        auto it = facts_.find(fact_id);
        if (it == facts_.end()) throw NotFoundError("unknown fact " + fact_id);
        return it->second;
    }

    bool contains(const std::string& fact_id) const { return facts_.count(fact_id) != 0; }
    const std::map<std::string, Fact>& facts() const { return facts_; }
    const std::vector<std::string>& audit_log() const { return audit_; }

    /// Accepted and modified facts, ordered by id.
    std::vector<Fact> ontology() const {
        std::vector<Fact> out;
        for (const auto& [id, f] : facts_)
            if (f.in_ontology()) out.push_back(f);
        return out;
    }

    /// term -> ids of ontology facts touching it
    std::map<std::string, std::set<std::string>> entity_index() const {
        std::map<std::string, std::set<std::string>> idx;
        for (const auto& [id, f] : facts_)
            if (f.in_ontology()) {
                idx[f.source].insert(id);
                idx[f.target].insert(id);
            }
        return idx;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [id, f] : facts_) arr.push_back(tracefacts::to_json(f));
        return {{"facts", arr}};
    }

private:
    // Pure state transition shared by live decisions and replay.
    Fact decided(const Fact& current, const Decision& d, const std::string& timestamp) const {
        Fact f = current;
        switch (d.action) {
        case DecisionAction::Reject: f.status = FactStatus::Rejected; break;
        case DecisionAction::Accept:
            if (d.relation) f.relation = *d.relation;
            f.status = FactStatus::Accepted;
            break;
        case DecisionAction::Modify:
            if (!d.relation && !d.source && !d.target) throw ValidationError("modify needs a relation or terms");
            if (d.relation) f.relation = *d.relation;
            if (d.source) f.source = *d.source;
            if (d.target) f.target = *d.target;
            f.status = FactStatus::Modified;
            break;
        }
        if (f.status != FactStatus::Rejected) {
            if (f.relation.empty()) throw ValidationError("fact " + f.id + " needs a non-empty relation");
            if (f.source.empty() || f.target.empty()) throw ValidationError("fact " + f.id + " needs non-empty terms");
            if (f.source == f.target) throw ValidationError("fact " + f.id + " would relate " + f.source + " to itself");
            for (const auto& [id, other] : facts_)
                if (id != f.id && other.in_ontology() && other.source == f.source && other.target == f.target &&
                    other.relation == f.relation)
                    throw ConflictError("fact (" + f.source + ", " + f.relation + ", " + f.target + ") already accepted as " + id);
        }
        if (!d.editor.empty()) f.provenance.editor = d.editor;
        f.provenance.timestamp = timestamp;
        return f;
    }

    void apply(const nlohmann::json& ev) {
        const std::string kind = ev.at("event").get<std::string>();
        if (kind == "suggest") {
            Fact f = fact_from_json(ev.at("fact"));
            facts_.emplace(f.id, std::move(f));
        } else if (kind == "decision") {
            Decision d;
            d.action = decision_action_from(ev.at("action").get<std::string>());
            if (ev.contains("relation")) d.relation = ev.at("relation").get<std::string>();
            if (ev.contains("source")) d.source = ev.at("source").get<std::string>();
            if (ev.contains("target")) d.target = ev.at("target").get<std::string>();
            d.editor = ev.value("editor", "");
            const std::string id = ev.at("fact_id").get<std::string>();
            Fact next = decided(get(id), d, ev.value("timestamp", ""));
            if (next.status == FactStatus::Rejected) rejected_.insert(detail::unordered_key(next.source, next.target));
            else rejected_.erase(detail::unordered_key(next.source, next.target));
            facts_[id] = std::move(next);
        } else {
            throw ValidationError("unknown audit event " + kind);
        }
    }

    void log(const nlohmann::json& ev) {
        audit_.push_back(ev.dump());
        if (dir_.empty()) return;
        const auto path = dir_ / "audit.jsonl";
        std::ofstream out(path, std::ios::app | std::ios::binary);
        if (!out) throw IoError(path.string(), "cannot append to audit log");
        out << audit_.back() << '\n';
        out.flush();
        save_snapshot();
    }

    void save_snapshot() const {
        if (dir_.empty()) return;
        detail::atomic_write(dir_ / "ontology.json", to_json().dump(2) + "\n");
    }

    Clock clock_;
    std::filesystem::path dir_;
    std::map<std::string, Fact> facts_;
    std::set<std::pair<std::string, std::string>> rejected_;
    std::vector<std::string> audit_;
};

/// Accepted facts as a JSON array.
inline nlohmann::json export_json(const std::vector<Fact>& facts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : facts) arr.push_back(to_json(f));
    return arr;
}

inline std::vector<Fact> import_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw ValidationError("ontology export must be a JSON array");
    std::vector<Fact> out;
    for (const auto& j : arr) out.push_back(fact_from_json(j));
    return out;
}

inline constexpr const char* kTurtleNamespace = "http://example.org/tracefacts#";

/// Prefixed local name: spaces become '_', anything outside [A-Za-z0-9_-] is percent-encoded.
inline std::string turtle_local_name(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (c == ' ') out.push_back('_');
        else if (std::isalnum(c) || c == '_' || (c == '-' && i > 0)) out.push_back(static_cast<char>(c));
        else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

inline std::string export_turtle(const std::vector<Fact>& facts) {
    std::ostringstream out;
    out << "@prefix tf: <" << kTurtleNamespace << "> .\n";
    for (const auto& f : facts)
        out << "tf:" << turtle_local_name(f.source) << " tf:" << turtle_local_name(f.relation) << " tf:"
            << turtle_local_name(f.target) << " .\n";
    return out.str();
}

} // namespace tracefacts
