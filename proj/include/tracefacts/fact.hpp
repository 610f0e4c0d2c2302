#pragma once

#include "tracefacts/error.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace tracefacts {

inline constexpr const char* kAssociatedWith = "associated-with";

enum class FactStatus { Suggested, Accepted, Rejected, Modified };

inline std::string_view to_string(FactStatus s) {
    switch (s) {
    case FactStatus::Suggested: return "suggested";
    case FactStatus::Accepted: return "accepted";
    case FactStatus::Rejected: return "rejected";
    case FactStatus::Modified: return "modified";
    }
    return "suggested";
}

inline FactStatus fact_status_from(std::string_view s) {
    if (s == "suggested") return FactStatus::Suggested;
    if (s == "accepted") return FactStatus::Accepted;
    if (s == "rejected") return FactStatus::Rejected;
    if (s == "modified") return FactStatus::Modified;
    throw ValidationError("unknown fact status " + std::string(s));
}

struct Provenance {
    std::string link_id;
    double conf = 0.0;
    nlohmann::json evidence = nlohmann::json::object();
    std::string editor;
    std::string timestamp;

    bool operator==(const Provenance&) const = default;
};

struct Fact {
    std::string id;
    std::string source;
    std::string target;
    std::string relation;
    FactStatus status = FactStatus::Suggested;
    Provenance provenance;

    bool in_ontology() const { return status == FactStatus::Accepted || status == FactStatus::Modified; }
    bool operator==(const Fact&) const = default;
};

/// Stable id: "f" followed by the FNV-1a 64-bit hash of link, source and target.
inline std::string fact_id(std::string_view link_id, std::string_view source, std::string_view target) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    mix(link_id);
    mix("\x1f");
    mix(source);
    mix("\x1f");
    mix(target);
    char buf[20];
    std::snprintf(buf, sizeof buf, "f%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline nlohmann::json to_json(const Fact& f) {
    return {{"id", f.id},
            {"source", f.source},
            {"target", f.target},
            {"relation", f.relation},
            {"status", to_string(f.status)},
            {"provenance",
             {{"link_id", f.provenance.link_id},
              {"conf", f.provenance.conf},
              {"evidence", f.provenance.evidence},
              {"editor", f.provenance.editor},
              {"timestamp", f.provenance.timestamp}}}};
}

inline Fact fact_from_json(const nlohmann::json& j) {
    try {
        Fact f;
        f.id = j.at("id").get<std::string>();
        f.source = j.at("source").get<std::string>();
        f.target = j.at("target").get<std::string>();
        f.relation = j.at("relation").get<std::string>();
        f.status = fact_status_from(j.at("status").get<std::string>());
        const auto& p = j.at("provenance");
        f.provenance.link_id = p.at("link_id").get<std::string>();
        f.provenance.conf = p.at("conf").get<double>();
        f.provenance.evidence = p.value("evidence", nlohmann::json::object());
        f.provenance.editor = p.value("editor", "");
        f.provenance.timestamp = p.value("timestamp", "");
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed fact: ") + e.what());
    }
}

} // namespace tracefacts
