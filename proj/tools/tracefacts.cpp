#include "tracefacts/arm.hpp"
#include "tracefacts/corpus.hpp"
#include "tracefacts/eval.hpp"
#include "tracefacts/fusion.hpp"
#include "tracefacts/lexsyn.hpp"
#include "tracefacts/pipeline.hpp"
#include "tracefacts/semrel.hpp"
#include "tracefacts/service.hpp"
#include "tracefacts/store.hpp"
#include "tracefacts/topics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

namespace fs = std::filesystem;
using namespace tracefacts;
using nlohmann::json;

namespace {

struct Common {
    std::string project = ".";
    std::string wordnet;

    LoadOptions options(bool require_wordnet) const {
        LoadOptions o;
        if (!wordnet.empty()) o.wordnet_dir = wordnet;
        o.require_wordnet = require_wordnet;
        return o;
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot write file");
    return out;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    auto out = open_out(out_path);
    out << j.dump(2) << '\n';
}

int run_corpus(const Common& c, double threshold, const std::string& out_path) {
    const ProjectLayout layout{c.project};
    Project project = ingest_project(layout.artifacts(), layout.links());
    CorpusStats st = extract_terms(project, layout.domain(), layout.general(), threshold);
    json summary{{"artifacts", project.artifacts().size()},
                 {"links", project.links().size()},
                 {"terms", st.terms().size()},
                 {"domain_specific_terms", st.domain_specific_count()},
                 {"total_domain_terms", st.total_domain_terms()},
                 {"total_general_terms", st.total_general_terms()}};
    if (!out_path.empty()) emit(st.to_json(), out_path);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_syn(const Common& c, const std::string& rules_path, const std::string& link_id, bool dump_rules) {
    if (dump_rules) {
        std::cout << rules_to_json(default_lsp_rules()).dump(2) << '\n';
        return 0;
    }
    const ProjectLayout layout{c.project};
    Project project = ingest_project(layout.artifacts(), layout.links());
    auto domain = load_corpus_dir(layout.domain());
    auto general = load_corpus_dir(layout.general());
    MinerConfig config = MinerConfig::load(layout.dir);
    CorpusStats st = extract_terms(project, domain, general, config.ds_threshold);
    const auto rules = !rules_path.empty() ? load_lsp_rules(rules_path)
                       : config.rules_file ? load_lsp_rules(*config.rules_file)
                                           : default_lsp_rules();
    SynIndex idx(project, st, domain, rules);
    json arr = json::array();
    if (link_id.empty()) {
        for (const auto& e : idx.all()) arr.push_back(to_json(e));
    } else {
        const TraceLink& l = project.link(link_id);
        for (const auto& s : st.domain_terms_in(project.artifact(l.source_id)))
            for (const auto& t : st.domain_terms_in(project.artifact(l.target_id)))
                if (auto e = idx.evidence_for_link(l, s.text, t.text)) {
                    json j = to_json(*e);
                    j["source"] = s.text;
                    j["target"] = t.text;
                    j["display"] = e->display_relation();
                    arr.push_back(std::move(j));
                }
    }
    std::cout << arr.dump(2) << '\n';
    return 0;
}

int run_sem(const Common& c, const std::string& a, const std::string& b) {
    auto miner = load_miner(c.project, c.options(true));
    const std::string na = normalize_phrase(a), nb = normalize_phrase(b);
    const SemScore s = miner->sem(na, nb);
    std::cout << json{{"a", na}, {"b", nb}, {"hw", s.hw}, {"aw", s.aw}}.dump(2) << '\n';
    return 0;
}

int run_arm(const Common& c, std::size_t min_cooccur, std::size_t top) {
    const ProjectLayout layout{c.project};
    Project project = ingest_project(layout.artifacts(), layout.links());
    MinerConfig config = MinerConfig::load(layout.dir);
    CorpusStats st = extract_terms(project, layout.domain(), layout.general(), config.ds_threshold);
    ArmIndex idx(build_transactions(project, st), min_cooccur);
    json arr = json::array();
    for (const auto& s : idx.top_pairs(top)) arr.push_back(to_json(s));
    std::cout << arr.dump(2) << '\n';
    return 0;
}

int run_topics_train(const Common& c, LdaParams params, bool alpha_given, const std::string& out_path, std::size_t show) {
    if (!alpha_given) params.alpha = 50.0 / static_cast<double>(params.k);
    const ProjectLayout layout{c.project};
    Project project = ingest_project(layout.artifacts(), layout.links());
    auto domain = load_corpus_dir(layout.domain());
    auto general = load_corpus_dir(layout.general());
    MinerConfig config = MinerConfig::load(layout.dir);
    CorpusStats st = extract_terms(project, domain, general, config.ds_threshold);
    TopicModel m = train_lda(lda_documents(project, domain, st), params);
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        out << m.to_json().dump() << '\n';
    }
    for (std::size_t j = 0; j < std::min(show, m.k()); ++j) {
        std::cout << "topic " << j << ":";
        for (const auto& [w, p] : m.top_terms(j, 10)) std::cout << ' ' << w << '(' << p << ')';
        std::cout << '\n';
    }
    return 0;
}

int run_mine(const Common& c, const std::string& scheme_path, const std::string& accept_spec, const std::string& out_path,
             const std::string& link_id, bool record) {
    auto miner = load_miner(c.project, c.options(true));
    const ProjectLayout layout{c.project};
    std::optional<fs::path> sp;
    if (!scheme_path.empty()) sp = scheme_path;
    else if (fs::exists(layout.scheme())) sp = layout.scheme();
    const ConfidenceScheme scheme = load_scheme_or_default(sp);
    const AcceptPolicy policy = AcceptPolicy::parse(accept_spec);
    std::ofstream file;
    if (!out_path.empty()) file = open_out(out_path);
    std::ostream& out = out_path.empty() ? std::cout : file;
    std::optional<FactStore> store;
    if (record) store.emplace(FactStore::open(layout.store()));
    json accepted = json::array();
    std::size_t total = 0;
    for (const auto& l : miner->project().links()) {
        if (!link_id.empty() && l.id != link_id) continue;
        auto ranked = miner->mine(l, scheme);
        total += ranked.size();
        for (const auto& cf : ranked) out << to_json(cf).dump() << '\n';
        for (auto& f : accept(ranked, policy)) {
            if (store && !store->suggest(f)) continue;
            accepted.push_back(to_json(f));
        }
    }
    std::cerr << "ranked " << total << " candidate facts; " << accepted.size() << " selected by " << accept_spec << '\n';
    if (!out_path.empty()) std::cout << accepted.dump(2) << '\n';
    return 0;
}

int run_eval(const Common& c, const std::string& answers_path, std::size_t nmax, const std::string& seeds_spec,
             const std::string& csv_path, const std::string& dat_path, bool macro, const std::string& scheme_path) {
    auto miner = load_miner(c.project, c.options(true));
    const auto answers = load_answers(answers_path);
    const auto scheme = load_scheme_or_default(scheme_path.empty() ? std::nullopt : std::optional<fs::path>(scheme_path));
    const Averaging avg = macro ? Averaging::Macro : Averaging::Micro;
    const auto lists = miner->all_candidates();
    auto curves = technique_curves(lists, answers, scheme, nmax, avg);
    curves.push_back(random_baseline(lists, answers, parse_seeds(seeds_spec), nmax, avg));
    if (!csv_path.empty()) {
        auto out = open_out(csv_path);
        write_curves_csv(curves, out);
    } else {
        write_curves_csv(curves, std::cout);
    }
    if (!dat_path.empty()) {
        auto out = open_out(dat_path);
        write_curves_dat(curves, out);
    }
    for (const auto& cv : curves)
        std::cerr << cv.method << ": hit@6=" << cv.at(6) << " hit@20=" << cv.at(20) << " ceiling=" << cv.generation_ceiling
                  << (cv.defined ? "" : " (no answer facts)") << '\n';
    return 0;
}

int run_serve(const Common& c, int port) {
    auto miner = load_miner(c.project, c.options(true));
    const ProjectLayout layout{c.project};
    FactStore store = FactStore::open(layout.store());
    std::optional<fs::path> sp;
    if (fs::exists(layout.scheme())) sp = layout.scheme();
    Service service(*miner, store, load_scheme_or_default(sp), layout.dir);
    httplib::Server srv;
    service.install(srv);

    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        srv.stop();
    });
    if (!srv.bind_to_port("0.0.0.0", port)) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
        throw IoError("0.0.0.0:" + std::to_string(port), "cannot bind port (already in use?)");
    }
    std::cerr << "serving " << fs::absolute(layout.dir).string() << " on port " << port << '\n';
    srv.listen_after_bind();
    if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tracefacts: mine domain facts from trace links"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--project,--project-dir", common.project, "project directory")->check(CLI::ExistingDirectory);
        sub->add_option("--wordnet", common.wordnet, "WordNet dict directory");
    };

    auto* corpus = app.add_subcommand("corpus", "corpus statistics");
    corpus->require_subcommand(1);
    auto* corpus_build = corpus->add_subcommand("build", "extract terms and domain specificity");
    add_common(corpus_build);
    double threshold = kDefaultThreshold;
    std::string out_path;
    corpus_build->add_option("--threshold", threshold, "domain-specificity threshold");
    corpus_build->add_option("--out", out_path, "write term statistics JSON here");

    auto* syn = app.add_subcommand("syn", "lexico-syntactic and verb-pattern evidence");
    add_common(syn);
    std::string rules_path, link_id;
    bool dump_rules = false;
    syn->add_option("--rules", rules_path, "pattern rules JSON");
    syn->add_option("--link", link_id, "restrict to one trace link");
    syn->add_flag("--print-default-rules", dump_rules, "print the built-in rules and exit");

    auto* sem = app.add_subcommand("sem", "semantic relatedness of two terms");
    add_common(sem);
    std::string term_a, term_b;
    sem->add_option("a", term_a)->required();
    sem->add_option("b", term_b)->required();

    auto* arm = app.add_subcommand("arm", "association rules over trace links");
    add_common(arm);
    std::size_t min_cooccur = 1, top = 50;
    arm->add_option("--min-cooccur", min_cooccur);
    arm->add_option("--top", top);

    auto* topics = app.add_subcommand("topics", "topic modeling");
    topics->require_subcommand(1);
    auto* train = topics->add_subcommand("train", "train LDA over domain documents and artifacts");
    add_common(train);
    LdaParams lda;
    std::size_t show = 5;
    auto* alpha_opt = train->add_option("--alpha", lda.alpha);
    train->add_option("--k", lda.k);
    train->add_option("--iters", lda.iterations);
    train->add_option("--beta", lda.beta);
    train->add_option("--seed", lda.seed);
    train->add_option("--out", out_path, "write the model JSON here");
    train->add_option("--show", show, "print the top terms of this many topics");

    auto* mine = app.add_subcommand("mine", "rank candidate facts per trace link");
    add_common(mine);
    std::string scheme_path, accept_spec = "top:10";
    bool record = false;
    mine->add_option("--scheme", scheme_path, "confidence scheme JSON");
    mine->add_option("--accept", accept_spec, "top:N or conf:x");
    mine->add_option("--out", out_path, "candidates JSON Lines");
    mine->add_option("--link", link_id, "restrict to one trace link");
    mine->add_flag("--record", record, "register selected facts as suggestions in the project store");

    auto* ev = app.add_subcommand("eval", "hit-ratio curves against answer sets");
    add_common(ev);
    std::string answers_path, seeds = "1..1000", dat_path;
    std::size_t nmax = 100;
    bool macro = false;
    ev->add_option("--answers", answers_path)->required();
    ev->add_option("--nmax", nmax);
    ev->add_option("--seeds", seeds, "e.g. 1..1000 or 1,2,3");
    ev->add_option("--out", out_path, "CSV output (method,N,hit_ratio)");
    ev->add_option("--dat", dat_path, "gnuplot data output");
    ev->add_option("--scheme", scheme_path);
    ev->add_flag("--macro", macro, "macro-average over links");

    auto* serve = app.add_subcommand("serve", "HTTP API for vetting");
    add_common(serve);
    int port = 8080;
    if (const char* env = std::getenv("TRACEFACTS_PORT"); env && *env) port = std::atoi(env);
    serve->add_option("--port", port);

    CLI11_PARSE(app, argc, argv);
    try {
        if (corpus_build->parsed()) return run_corpus(common, threshold, out_path);
        if (syn->parsed()) return run_syn(common, rules_path, link_id, dump_rules);
        if (sem->parsed()) return run_sem(common, term_a, term_b);
        if (arm->parsed()) return run_arm(common, min_cooccur, top);
        if (train->parsed()) return run_topics_train(common, lda, alpha_opt->count() > 0, out_path, show);
        if (mine->parsed()) return run_mine(common, scheme_path, accept_spec, out_path, link_id, record);
        if (ev->parsed()) return run_eval(common, answers_path, nmax, seeds, out_path, dat_path, macro, scheme_path);
        if (serve->parsed()) return run_serve(common, port);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
