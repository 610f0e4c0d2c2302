#pragma once

#include "tracefacts/error.hpp"
#include "tracefacts/fact.hpp"
#include "tracefacts/fusion.hpp"
#include "tracefacts/pipeline.hpp"
#include "tracefacts/store.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace tracefacts {

inline constexpr std::size_t kDefaultMaxHops = 2;

struct Expansion {
    std::string term;
    std::string relation;  // relation of the last fact on the path
    std::size_t hops = 0;
    std::vector<std::string> path;  // fact ids from the original term outward
};

struct ExpandedQuery {
    std::vector<std::string> originals;
    std::map<std::string, std::vector<Expansion>> expansions;  // original -> related terms
};

namespace detail {

enum class EdgeKind { Taxonomic, Generic };

struct Edge {
    std::string to;
    std::string fact_id;
    std::string relation;
    EdgeKind kind;
};

// Directed traversal edges derived from accepted facts.
inline std::map<std::string, std::vector<Edge>> expansion_graph(const std::vector<Fact>& facts) {
    std::map<std::string, std::vector<Edge>> g;
    for (const auto& f : facts) {
        const std::string r = to_lower(f.relation);
        auto add = [&](const std::string& from, const std::string& to, EdgeKind k) {
            g[from].push_back({to, f.id, f.relation, k});
        };
        if (r == "synonym" || r == "synonym-of" || r == "is-synonym-of") {
            add(f.source, f.target, EdgeKind::Taxonomic);
            add(f.target, f.source, EdgeKind::Taxonomic);
        } else if (r == "is-subclass-of" || r == "is-part-of" || r == "subsystem-of") {
            add(f.target, f.source, EdgeKind::Taxonomic);  // downward from the superclass / whole
        } else if (r == "is-superclass-of" || r == "has-part" || r == "subsystem" || r == "has-subsystem") {
            add(f.source, f.target, EdgeKind::Taxonomic);
        } else if (r == kAssociatedWith) {
            add(f.source, f.target, EdgeKind::Generic);
            add(f.target, f.source, EdgeKind::Generic);
        }
    }
    return g;
}

} // namespace detail

/// Breadth-first expansion of each query term over accepted facts.
inline ExpandedQuery expand_query(const std::vector<std::string>& terms, const std::vector<Fact>& accepted,
                                  std::size_t max_hops = kDefaultMaxHops,
                                  const Analyzer& analyzer = Analyzer::default_instance()) {
    ExpandedQuery q;
    for (const auto& t : terms) {
        std::string n = normalize_phrase(t, analyzer);
        if (!n.empty() && std::find(q.originals.begin(), q.originals.end(), n) == q.originals.end()) q.originals.push_back(n);
    }
    const auto graph = detail::expansion_graph(accepted);
    for (const auto& origin : q.originals) {
        auto& out = q.expansions[origin];
        std::set<std::string> seen{origin};
        std::deque<Expansion> frontier{{origin, "", 0, {}}};
        while (!frontier.empty()) {
            Expansion cur = std::move(frontier.front());
            frontier.pop_front();
            if (cur.hops >= max_hops) continue;
            auto it = graph.find(cur.term);
            if (it == graph.end()) continue;
            for (const auto& e : it->second) {
                if (e.kind == detail::EdgeKind::Generic && cur.hops != 0) continue;
                if (!seen.insert(e.to).second) continue;
                Expansion next{e.to, e.relation, cur.hops + 1, cur.path};
                next.path.push_back(e.fact_id);
                out.push_back(next);
                frontier.push_back(std::move(next));
            }
        }
    }
    return q;
}

inline nlohmann::json to_json(const ExpandedQuery& q) {
    nlohmann::json ex = nlohmann::json::object();
    for (const auto& [origin, list] : q.expansions) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : list) arr.push_back({{"term", e.term}, {"relation", e.relation}, {"hops", e.hops}, {"path", e.path}});
        ex[origin] = arr;
    }
    return {{"originals", q.originals}, {"expansions", ex}};
}

struct SearchHit {
    std::string artifact_id;
    double score = 0.0;
    std::vector<std::string> matched;
};

namespace detail {

inline bool artifact_mentions(const Artifact& a, const std::string& term) {
    std::vector<std::string> words;
    std::istringstream in(term);
    for (std::string w; in >> w;) words.push_back(w);
    if (words.empty()) return false;
    for (const auto& s : a.sentences)
        for (std::size_t i = 0; i + words.size() <= s.size(); ++i) {
            bool ok = true;
            for (std::size_t k = 0; k < words.size() && ok; ++k) ok = s[i + k].lemma == words[k];
            if (ok) return true;
        }
    return false;
}

} // namespace detail

/// Artifacts ranked by matched originals (weight 1) plus expansions (weight 1/(1+hops)).
inline std::vector<SearchHit> search_artifacts(const Project& project, const ExpandedQuery& q) {
    std::map<std::string, double> weight;
    for (const auto& o : q.originals) weight[o] = 1.0;
    for (const auto& [origin, list] : q.expansions)
        for (const auto& e : list) {
            const double w = 1.0 / (1.0 + static_cast<double>(e.hops));
            auto [it, fresh] = weight.emplace(e.term, w);
            if (!fresh) it->second = std::max(it->second, w);
        }
    std::vector<SearchHit> hits;
    for (const auto& a : project.artifacts()) {
        SearchHit h{a.id, 0.0, {}};
        for (const auto& [term, w] : weight)
            if (detail::artifact_mentions(a, term)) {
                h.score += w;
                h.matched.push_back(term);
            }
        if (!h.matched.empty()) hits.push_back(std::move(h));
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& x, const SearchHit& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.artifact_id < y.artifact_id;
    });
    return hits;
}

inline nlohmann::json to_json(const SearchHit& h) {
    return {{"artifact_id", h.artifact_id}, {"score", h.score}, {"matched", h.matched}};
}

/// Request handling on top of a miner and a store; safe for concurrent requests.
class Service {
public:
    Service(const Miner& miner, FactStore& store, ConfidenceScheme scheme = {},
            std::optional<std::filesystem::path> project_dir = std::nullopt)
        : miner_(miner), store_(store), default_scheme_(std::move(scheme)), project_dir_(std::move(project_dir)) {}

    nlohmann::json summary() const {
        nlohmann::json j = miner_.project().summary();
        j["domain_specific_terms"] = miner_.corpus().domain_specific_count();
        std::lock_guard lock(store_mutex_);
        j["ontology_facts"] = store_.ontology().size();
        return j;
    }

    nlohmann::json link_json(const TraceLink& l, bool with_terms) const {
        const auto& p = miner_.project();
        auto side = [&](const std::string& id) {
            const auto& a = p.artifact(id);
            nlohmann::json j{{"id", a.id}, {"kind", to_string(a.kind)}, {"text", a.text}};
            if (with_terms) j["terms"] = miner_.terms_of(id);
            return j;
        };
        nlohmann::json j{{"id", l.id}, {"source", side(l.source_id)}, {"target", side(l.target_id)}, {"label", nullptr}};
        if (l.label) j["label"] = *l.label;
        return j;
    }

    nlohmann::json links() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& l : miner_.project().links()) arr.push_back(link_json(l, false));
        return arr;
    }

    nlohmann::json link(const std::string& id) const { return link_json(miner_.project().link(id), true); }

    /// Ranked candidates for a link, registered as suggestions; rejected pairs are dropped.
    nlohmann::json candidates(const std::string& link_id, const std::string& scheme_name) {
        const TraceLink& l = miner_.project().link(link_id);
        const auto ranked = mined(l, scheme_name);
        nlohmann::json arr = nlohmann::json::array();
        std::lock_guard lock(store_mutex_);
        std::size_t rank = 0;
        for (const auto& c : ranked) {
            auto f = store_.suggest(to_fact(c));
            if (!f || f->status == FactStatus::Rejected) continue;
            nlohmann::json j = to_json(c);
            j["rank"] = ++rank;
            j["status"] = to_string(f->status);
            j["fact"] = to_json(*f);
            arr.push_back(std::move(j));
        }
        return {{"link_id", l.id}, {"scheme", scheme_name}, {"candidates", arr}};
    }

    nlohmann::json decide(const std::string& fact_id, const nlohmann::json& body) {
        const Decision d = Decision::from_json(body);
        std::lock_guard lock(store_mutex_);
        return to_json(store_.record_decision(fact_id, d));
    }

    nlohmann::json ontology() const {
        std::lock_guard lock(store_mutex_);
        nlohmann::json ents = nlohmann::json::object();
        for (const auto& [term, ids] : store_.entity_index()) ents[term] = ids;
        return {{"facts", export_json(store_.ontology())}, {"entities", ents}};
    }

    std::string export_ontology(const std::string& format) const {
        std::lock_guard lock(store_mutex_);
        if (format == "turtle" || format == "ttl") return export_turtle(store_.ontology());
        if (format == "json") return export_json(store_.ontology()).dump(2);
        throw ValidationError("unknown export format " + format);
    }

    ExpandedQuery expand(const nlohmann::json& body) const {
        if (!body.is_object() || !body.contains("terms") || !body.at("terms").is_array())
            throw ValidationError("query needs a \"terms\" array");
        std::vector<std::string> terms;
        for (const auto& t : body.at("terms")) {
            if (!t.is_string()) throw ValidationError("query terms must be strings");
            terms.push_back(t.get<std::string>());
        }
        std::size_t hops = kDefaultMaxHops;
        if (auto h = body.find("max_hops"); h != body.end()) {
            if (!h->is_number_integer() || h->get<long long>() < 0) throw ValidationError("max_hops must be a non-negative integer");
            hops = h->get<std::size_t>();
        }
        std::vector<Fact> accepted;
        {
            std::lock_guard lock(store_mutex_);
            accepted = store_.ontology();
        }
        return expand_query(terms, accepted, hops);
    }

    nlohmann::json search(const nlohmann::json& body) const {
        const auto q = expand(body);
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& h : search_artifacts(miner_.project(), q)) arr.push_back(to_json(h));
        return {{"query", to_json(q)}, {"results", arr}};
    }

    /// Installs every endpoint plus CORS headers on an httplib server.
    void install(httplib::Server& srv) {
        srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                 {"Access-Control-Allow-Headers", "Content-Type"},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        srv.Get("/project/summary", wrap([this](const httplib::Request&) { return summary(); }));
        srv.Get("/links", wrap([this](const httplib::Request&) { return links(); }));
        srv.Get(R"(/links/([^/]+))", wrap([this](const httplib::Request& r) { return link(r.matches[1]); }));
        srv.Get(R"(/links/([^/]+)/candidates)", wrap([this](const httplib::Request& r) {
                    return candidates(r.matches[1], r.has_param("scheme") ? r.get_param_value("scheme") : "default");
                }));
        srv.Post(R"(/facts/([^/]+)/decision)",
                 wrap([this](const httplib::Request& r) { return decide(r.matches[1], parse_body(r)); }));
        srv.Get("/ontology", wrap([this](const httplib::Request&) { return ontology(); }));
        srv.Get("/ontology/export", [this](const httplib::Request& r, httplib::Response& res) {
            guarded(res, [&] {
                const std::string fmt = r.has_param("format") ? r.get_param_value("format") : "json";
                res.set_content(export_ontology(fmt), fmt == "json" ? "application/json" : "text/turtle");
            });
        });
        srv.Post("/query/expand", wrap([this](const httplib::Request& r) { return to_json(expand(parse_body(r))); }));
        srv.Post("/query/search", wrap([this](const httplib::Request& r) { return search(parse_body(r)); }));
    }

private:
    static nlohmann::json parse_body(const httplib::Request& r) {
        try {
            return nlohmann::json::parse(r.body);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(std::string("request body is not JSON: ") + e.what());
        }
    }

    template <class F>
    static void guarded(httplib::Response& res, F&& f) {
        auto fail = [&](int status, const std::string& msg) {
            res.status = status;
            res.set_content(nlohmann::json{{"error", msg}}.dump(), "application/json");
        };
        try {
            f();
        } catch (const NotFoundError& e) {
            fail(404, e.what());
        } catch (const ConflictError& e) {
            fail(409, e.what());
        } catch (const ValidationError& e) {
            fail(400, e.what());
        } catch (const ParseError& e) {
            fail(400, e.what());
        } catch (const std::exception& e) {
            fail(500, e.what());
        }
    }

    template <class F>
    static httplib::Server::Handler wrap(F f) {
        return [f = std::move(f)](const httplib::Request& r, httplib::Response& res) {
            guarded(res, [&] { res.set_content(f(r).dump(), "application/json"); });
        };
    }

    ConfidenceScheme scheme_named(const std::string& name) const {
        if (name.empty() || name == "default") return default_scheme_;
        if (name.find('/') != std::string::npos || name.find("..") != std::string::npos)
            throw ValidationError("scheme names may not contain paths");
        if (!project_dir_) throw NotFoundError("unknown scheme " + name);
        auto path = *project_dir_ / "schemes" / (name + ".json");
        if (!std::filesystem::exists(path)) throw NotFoundError("unknown scheme " + name);
        return ConfidenceScheme::load(path);
    }

    std::vector<CandidateFact> mined(const TraceLink& l, const std::string& scheme_name) {
        const std::string key = scheme_name + '\x1f' + l.id;
        {
            std::shared_lock lock(cache_mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        auto ranked = miner_.mine(l, scheme_named(scheme_name));
        std::unique_lock lock(cache_mutex_);
        return cache_.emplace(key, std::move(ranked)).first->second;
    }

    const Miner& miner_;
    FactStore& store_;
    ConfidenceScheme default_scheme_;
    std::optional<std::filesystem::path> project_dir_;
    mutable std::mutex store_mutex_;
    std::shared_mutex cache_mutex_;
    std::map<std::string, std::vector<CandidateFact>> cache_;
};

} // namespace tracefacts
