#pragma once

#include "tracefacts/error.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace tracefacts {

enum class Pos : std::uint8_t { Noun, Verb, Adj, Adv, Prep, Det, Other };

inline std::string_view to_string(Pos p) {
    switch (p) {
    case Pos::Noun: return "NOUN";
    case Pos::Verb: return "VERB";
    case Pos::Adj: return "ADJ";
    case Pos::Adv: return "ADV";
    case Pos::Prep: return "PREP";
    case Pos::Det: return "DET";
    case Pos::Other: return "OTHER";
    }
    return "OTHER";
}

/// Set of admissible tags for a word; `primary` is the most frequent reading.
struct LexEntry {
    Pos primary = Pos::Noun;
    std::uint8_t mask = 0;

    bool allows(Pos p) const { return (mask >> static_cast<int>(p)) & 1u; }
    bool ambiguous() const { return (mask & (mask - 1)) != 0; }
};

namespace detail {

inline Pos pos_from_code(char c) {
    switch (c) {
    case 'N': return Pos::Noun;
    case 'V': return Pos::Verb;
    case 'J': return Pos::Adj;
    case 'R': return Pos::Adv;
    case 'P': return Pos::Prep;
    case 'D': return Pos::Det;
    default: return Pos::Other;
    }
}

inline LexEntry entry_from_codes(std::string_view codes) {
    LexEntry e;
    e.primary = pos_from_code(codes.front());
    for (char c : codes) e.mask |= static_cast<std::uint8_t>(1u << static_cast<int>(pos_from_code(c)));
    return e;
}

// word -> tag codes, most frequent reading first.
// N noun, V verb, J adjective, R adverb, P preposition, D determiner, O other.
struct RawEntry {
    const char* word;
    const char* codes;
};

inline constexpr RawEntry kClosedClass[] = {
    {"the", "D"}, {"a", "D"}, {"an", "D"}, {"this", "D"}, {"these", "D"}, {"those", "D"},
    {"each", "D"}, {"every", "D"}, {"all", "D"}, {"any", "D"}, {"some", "D"}, {"no", "D"},
    {"another", "D"}, {"both", "D"}, {"either", "D"}, {"neither", "D"}, {"its", "D"},
    {"their", "D"}, {"his", "D"}, {"her", "D"}, {"our", "D"}, {"your", "D"}, {"my", "D"},
    {"several", "D"}, {"many", "D"}, {"few", "D"}, {"much", "D"}, {"more", "D"}, {"most", "D"},
    {"less", "D"}, {"least", "D"},
    {"of", "P"}, {"in", "P"}, {"on", "P"}, {"at", "P"}, {"by", "P"}, {"for", "P"}, {"with", "P"},
    {"from", "P"}, {"to", "P"}, {"into", "P"}, {"onto", "P"}, {"upon", "P"}, {"about", "P"},
    {"above", "P"}, {"below", "P"}, {"under", "P"}, {"over", "P"}, {"between", "P"},
    {"among", "P"}, {"through", "P"}, {"during", "P"}, {"before", "P"}, {"after", "P"},
    {"against", "P"}, {"without", "P"}, {"within", "P"}, {"across", "P"}, {"along", "P"},
    {"around", "P"}, {"behind", "P"}, {"beyond", "P"}, {"via", "P"}, {"per", "P"},
    {"than", "P"}, {"toward", "P"}, {"towards", "P"}, {"throughout", "P"}, {"despite", "P"},
    {"except", "P"}, {"like", "PV"}, {"near", "P"}, {"off", "P"}, {"out", "P"}, {"up", "P"},
    {"down", "P"}, {"as", "P"}, {"until", "P"}, {"since", "P"}, {"beside", "P"}, {"inside", "P"},
    {"outside", "P"}, {"underneath", "P"}, {"unto", "P"},
    {"i", "O"}, {"you", "O"}, {"he", "O"}, {"she", "O"}, {"it", "O"}, {"we", "O"}, {"they", "O"},
    {"me", "O"}, {"him", "O"}, {"us", "O"}, {"them", "O"}, {"who", "O"}, {"whom", "O"},
    {"which", "O"}, {"what", "O"}, {"whose", "O"}, {"that", "O"}, {"there", "O"}, {"here", "O"},
    {"itself", "O"}, {"themselves", "O"}, {"himself", "O"}, {"herself", "O"}, {"one", "O"},
    {"and", "O"}, {"or", "O"}, {"but", "O"}, {"nor", "O"}, {"so", "O"}, {"yet", "O"},
    {"if", "O"}, {"when", "O"}, {"while", "O"}, {"because", "O"}, {"although", "O"},
    {"though", "O"}, {"unless", "O"}, {"whether", "O"}, {"then", "O"}, {"not", "O"},
    {"how", "O"}, {"where", "O"}, {"why", "O"}, {"whenever", "O"}, {"wherever", "O"},
    {"once", "O"}, {"thus", "O"}, {"hence", "O"}, {"therefore", "O"}, {"otherwise", "O"},
    {"eg", "O"}, {"ie", "O"}, {"e.g.", "O"}, {"i.e.", "O"}, {"etc.", "O"}, {"etc", "O"},
    {"'s", "O"}, {"'", "O"},
    {"be", "V"}, {"is", "V"}, {"are", "V"}, {"was", "V"}, {"were", "V"}, {"been", "V"},
    {"being", "V"}, {"am", "V"}, {"have", "V"}, {"has", "V"}, {"had", "V"}, {"having", "V"},
    {"do", "V"}, {"does", "V"}, {"did", "V"}, {"can", "V"}, {"could", "V"}, {"may", "V"},
    {"might", "V"}, {"must", "V"}, {"shall", "V"}, {"should", "V"}, {"will", "V"},
    {"would", "V"}, {"cannot", "V"},
};

inline constexpr RawEntry kOpenClass[] = {
    // adverbs
    {"also", "R"}, {"only", "R"}, {"very", "R"}, {"always", "R"}, {"never", "R"},
    {"often", "R"}, {"later", "R"}, {"already", "R"}, {"currently", "R"}, {"worldwide", "RJ"},
    {"again", "R"}, {"still", "R"}, {"just", "R"}, {"even", "R"}, {"too", "R"}, {"well", "R"},
    {"now", "R"}, {"soon", "R"}, {"together", "R"}, {"instead", "R"}, {"respectively", "R"},
    {"away", "R"}, {"back", "RN"}, {"forth", "R"}, {"ever", "R"}, {"almost", "R"},
    {"quickly", "R"}, {"twice", "R"}, {"thrice", "R"}, {"directly", "R"}, {"automatically", "R"}, {"immediately", "R"},
    {"approximately", "R"}, {"usually", "R"}, {"typically", "R"}, {"rather", "R"},
    // adjectives
    {"other", "J"}, {"similar", "J"}, {"such", "J"}, {"same", "J"}, {"different", "J"},
    {"medical", "J"}, {"clinical", "J"}, {"electronic", "J"}, {"new", "J"}, {"old", "J"},
    {"main", "J"}, {"primary", "J"}, {"secondary", "J"}, {"high", "J"}, {"low", "J"},
    {"hard", "J"}, {"soft", "J"}, {"real", "J"}, {"local", "J"}, {"audible", "J"},
    {"visual", "J"}, {"liquid", "JN"}, {"appropriate", "J"}, {"available", "J"}, {"valid", "J"},
    {"invalid", "J"}, {"current", "JN"}, {"specific", "J"}, {"general", "J"}, {"normal", "J"},
    {"functional", "J"}, {"safe", "J"}, {"critical", "J"}, {"continuous", "J"},
    {"maximum", "JN"}, {"minimum", "JN"}, {"total", "JN"}, {"single", "J"}, {"multiple", "J"},
    {"various", "J"}, {"certain", "J"}, {"able", "J"}, {"unable", "J"}, {"responsible", "J"},
    {"relevant", "J"}, {"necessary", "J"}, {"possible", "J"}, {"automatic", "J"},
    {"manual", "JN"}, {"previous", "J"}, {"next", "J"}, {"last", "J"}, {"first", "J"},
    {"second", "JN"}, {"final", "J"}, {"additional", "J"}, {"external", "J"}, {"internal", "J"},
    {"physical", "J"}, {"digital", "J"}, {"electrical", "J"}, {"remote", "J"}, {"personal", "J"},
    {"private", "J"}, {"public", "J"}, {"standard", "NJ"}, {"rear", "NJ"}, {"front", "NJ"},
    {"corresponding", "J"}, {"good", "J"}, {"large", "J"}, {"small", "J"}, {"big", "J"},
    {"long", "J"}, {"short", "J"}, {"full", "J"}, {"empty", "J"}, {"open", "JV"},
    {"closed", "J"}, {"active", "J"}, {"inactive", "J"}, {"correct", "JV"}, {"incorrect", "J"},
    {"accurate", "J"}, {"secure", "JV"}, {"optional", "J"}, {"mandatory", "J"},
    {"important", "J"}, {"useful", "J"}, {"common", "J"}, {"typical", "J"}, {"daily", "J"},
    {"hourly", "J"}, {"annual", "J"}, {"previously", "R"}, {"upper", "J"}, {"lower", "J"},
    {"excessive", "J"}, {"downstream", "JN"}, {"upstream", "JN"}, {"elevated", "J"},
    {"patient", "NJ"}, {"human", "JN"}, {"key", "NJ"}, {"healthy", "J"}, {"sick", "J"},
    {"free", "J"}, {"due", "J"}, {"own", "J"}, {"whole", "J"}, {"entire", "J"}, {"major", "J"},
    {"minor", "J"}, {"ready", "J"}, {"subject", "NJ"}, {"related", "J"}, {"unique", "J"},
    {"independent", "J"}, {"dependent", "J"}, {"present", "JV"}, {"absent", "J"},
    {"legal", "J"}, {"federal", "J"}, {"national", "J"}, {"international", "J"},
    {"american", "J"}, {"technical", "J"}, {"functionality", "N"},
    // nouns (including noun-primary noun/verb ambiguities)
    {"record", "NV"}, {"store", "NV"}, {"thread", "NV"}, {"drug", "NV"}, {"library", "N"},
    {"start", "NV"}, {"button", "NV"}, {"panel", "N"}, {"pump", "NV"}, {"alarm", "NV"},
    {"control", "NV"}, {"touch", "NV"}, {"report", "NV"}, {"test", "NV"}, {"design", "NV"},
    {"order", "NV"}, {"log", "NV"}, {"audit", "NV"}, {"review", "NV"}, {"document", "NV"},
    {"link", "NV"}, {"trace", "NV"}, {"function", "NV"}, {"signal", "NV"}, {"alert", "NV"},
    {"sound", "NV"}, {"process", "NV"}, {"query", "NV"}, {"search", "NV"}, {"result", "NV"},
    {"need", "VN"}, {"change", "NV"}, {"display", "NV"}, {"access", "NV"}, {"update", "NV"},
    {"request", "NV"}, {"limit", "NV"}, {"rate", "NV"}, {"dose", "NV"}, {"program", "NV"},
    {"schedule", "NV"}, {"fault", "N"}, {"failure", "N"}, {"exception", "N"}, {"monitor", "NV"},
    {"scan", "NV"}, {"light", "NVJ"}, {"power", "NV"}, {"supply", "NV"}, {"charge", "NV"},
    {"check", "NV"}, {"view", "NV"}, {"print", "NV"}, {"transfer", "NV"}, {"exchange", "NV"},
    {"return", "NV"}, {"work", "NV"}, {"state", "NV"}, {"name", "NV"}, {"set", "VN"},
    {"press", "NV"}, {"use", "VN"}, {"time", "NV"}, {"stamp", "NV"}, {"event", "N"},
    {"action", "N"}, {"entry", "N"}, {"occurrence", "N"}, {"speaker", "N"}, {"clinician", "N"},
    {"configuration", "N"}, {"warning", "N"}, {"hospital", "N"}, {"setting", "N"},
    {"system", "N"}, {"healthcare", "N"}, {"infusion", "N"}, {"profile", "N"},
    {"instrument", "N"}, {"area", "N"}, {"care", "NV"}, {"audio", "N"}, {"reservoir", "N"},
    {"pharmacy", "N"}, {"data", "N"}, {"information", "N"}, {"user", "N"}, {"device", "N"},
    {"volume", "N"}, {"bolus", "N"}, {"pause", "NV"}, {"model", "NV"}, {"hospitalization", "N"},
    {"battery", "N"}, {"energy", "N"}, {"indication", "N"}, {"indicator", "N"},
    {"container", "N"}, {"restriction", "N"}, {"rule", "NV"}, {"business", "N"},
    {"group", "NV"}, {"class", "N"}, {"flow", "NV"}, {"pattern", "N"}, {"hardware", "N"},
    {"software", "N"}, {"operation", "N"}, {"architecture", "N"}, {"safety", "N"},
    {"scanner", "N"}, {"detection", "N"}, {"status", "N"}, {"column", "N"},
    {"prescription", "N"}, {"login", "N"}, {"logout", "N"}, {"format", "NV"}, {"problem", "N"},
    {"interface", "NV"}, {"bus", "N"}, {"transaction", "N"}, {"diode", "N"},
    {"embolism", "N"}, {"line", "N"}, {"air", "N"}, {"subsystem", "N"}, {"component", "N"},
    {"requirement", "N"}, {"regulation", "N"}, {"nurse", "NV"}, {"physician", "N"},
    {"doctor", "N"}, {"provider", "N"}, {"person", "N"}, {"people", "N"}, {"staff", "N"},
    {"note", "NV"}, {"file", "NV"}, {"message", "N"}, {"screen", "NV"}, {"keypad", "N"},
    {"network", "N"}, {"server", "N"}, {"database", "N"}, {"table", "N"}, {"field", "N"},
    {"value", "NV"}, {"level", "N"}, {"unit", "N"}, {"concentration", "N"}, {"therapy", "N"},
    {"treatment", "N"}, {"medication", "N"}, {"allergy", "N"}, {"problem", "N"},
    {"mode", "N"}, {"period", "N"}, {"interval", "N"}, {"date", "NV"}, {"day", "N"},
    {"week", "N"}, {"month", "N"}, {"year", "N"}, {"hour", "N"}, {"minute", "N"},
    {"second", "NJ"}, {"way", "N"}, {"part", "N"}, {"type", "NV"}, {"kind", "N"},
    {"case", "N"}, {"example", "N"}, {"number", "N"}, {"amount", "N"}, {"list", "NV"},
    {"item", "N"}, {"option", "N"}, {"feature", "NV"}, {"service", "NV"}, {"product", "N"},
    {"vendor", "N"}, {"manufacturer", "N"}, {"customer", "N"}, {"hand", "N"}, {"body", "N"},
    {"blood", "N"}, {"tube", "N"}, {"tubing", "N"}, {"bag", "N"}, {"syringe", "N"},
    {"needle", "N"}, {"valve", "N"}, {"sensor", "N"}, {"motor", "N"}, {"door", "N"},
    {"cassette", "N"}, {"occlusion", "N"}, {"pressure", "N"}, {"bubble", "N"}, {"ice", "N"},
    {"shortcut", "N"}, {"plan", "NV"}, {"goal", "N"}, {"case", "N"}, {"step", "NV"},
    {"task", "N"}, {"role", "N"}, {"privilege", "N"}, {"password", "N"}, {"account", "N"},
    {"encryption", "N"}, {"storage", "N"}, {"backup", "N"}, {"history", "N"}, {"visit", "NV"},
    {"encounter", "NV"}, {"problem", "N"}, {"diagnosis", "N"}, {"analysis", "N"},
    {"series", "N"}, {"news", "N"}, {"species", "N"}, {"means", "N"}, {"basis", "N"},
    {"address", "NV"}, {"process", "NV"}, {"progress", "NV"}, {"success", "N"},
    {"loss", "N"}, {"glass", "N"}, {"class", "N"}, {"gas", "N"}, {"virus", "N"},
    {"focus", "NV"}, {"consensus", "N"}, {"census", "N"}, {"campus", "N"}, {"stimulus", "N"},
    {"emphasis", "N"}, {"axis", "N"}, {"thesis", "N"}, {"crisis", "N"}, {"hypothesis", "N"},
    {"synthesis", "N"}, {"prognosis", "N"}, {"alias", "N"}, {"bias", "N"}, {"canvas", "N"},
    {"atlas", "N"}, {"lens", "N"},
    // verbs
    {"include", "V"}, {"contain", "V"}, {"provide", "V"}, {"allow", "V"}, {"enable", "V"},
    {"require", "V"}, {"support", "VN"}, {"retrieve", "V"}, {"load", "VN"}, {"enter", "V"},
    {"confirm", "V"}, {"see", "V"}, {"hear", "V"}, {"combine", "V"}, {"compute", "V"},
    {"locate", "V"}, {"situate", "V"}, {"find", "V"}, {"incorporate", "V"}, {"consist", "V"},
    {"comprise", "V"}, {"make", "V"}, {"detect", "V"}, {"stop", "VN"}, {"deliver", "V"},
    {"infuse", "V"}, {"send", "V"}, {"receive", "V"}, {"generate", "V"}, {"create", "V"},
    {"delete", "V"}, {"notify", "V"}, {"indicate", "V"}, {"illuminate", "V"}, {"measure", "VN"},
    {"calculate", "V"}, {"verify", "V"}, {"validate", "V"}, {"run", "V"}, {"execute", "V"},
    {"perform", "V"}, {"manage", "V"}, {"maintain", "V"}, {"connect", "V"},
    {"communicate", "V"}, {"transmit", "V"}, {"select", "V"}, {"configure", "V"},
    {"specify", "V"}, {"define", "V"}, {"determine", "V"}, {"ensure", "V"}, {"protect", "V"},
    {"prevent", "V"}, {"identify", "V"}, {"authenticate", "V"}, {"authorize", "V"},
    {"encrypt", "V"}, {"capture", "V"}, {"prescribe", "V"}, {"administer", "V"},
    {"dispense", "V"}, {"occur", "V"}, {"correspond", "V"}, {"relate", "V"}, {"associate", "V"},
    {"want", "V"}, {"operate", "V"}, {"respond", "V"}, {"read", "V"}, {"write", "V"},
    {"show", "V"}, {"track", "VN"}, {"warn", "V"}, {"occlude", "V"}, {"exceed", "V"},
    {"reach", "V"}, {"remain", "V"}, {"become", "V"}, {"get", "V"}, {"take", "V"},
    {"give", "V"}, {"keep", "V"}, {"call", "VN"}, {"follow", "V"}, {"build", "V"},
    {"apply", "V"}, {"handle", "VN"}, {"accept", "V"}, {"reject", "V"}, {"modify", "V"},
    {"remove", "V"}, {"add", "V"}, {"edit", "V"}, {"save", "V"}, {"close", "V"},
    {"begin", "V"}, {"end", "NV"}, {"finish", "V"}, {"complete", "VJ"}, {"continue", "V"},
    {"initiate", "V"}, {"terminate", "V"}, {"resume", "V"}, {"activate", "V"},
    {"deactivate", "V"}, {"trigger", "VN"}, {"issue", "NV"}, {"produce", "V"},
    {"consume", "V"}, {"exist", "V"}, {"appear", "V"}, {"contribute", "V"}, {"describe", "V"},
    {"represent", "V"}, {"explain", "V"}, {"demonstrate", "V"}, {"evaluate", "V"},
    {"assess", "V"}, {"approve", "V"}, {"sign", "VN"}, {"assign", "V"}, {"archive", "VN"},
    {"export", "VN"}, {"import", "VN"}, {"convert", "V"}, {"transform", "V"},
    {"interpret", "V"}, {"order", "NV"}, {"list", "NV"}, {"sort", "V"}, {"filter", "VN"},
    {"mark", "VN"}, {"label", "NV"}, {"tag", "NV"}, {"attach", "V"}, {"insert", "V"},
    {"replace", "V"}, {"reset", "V"}, {"restart", "V"}, {"shut", "V"}, {"turn", "V"},
    {"hold", "V"}, {"lock", "VN"}, {"unlock", "V"}, {"limit", "NV"}, {"exit", "VN"},
    {"help", "VN"}, {"satisfy", "V"}, {"trace", "NV"}, {"mine", "V"}, {"learn", "V"},
    {"know", "V"}, {"think", "V"}, {"seem", "V"}, {"try", "V"}, {"ask", "V"}, {"tell", "V"},
    {"say", "V"}, {"catch", "V"}, {"demand", "VN"}, {"expand", "V"}, {"focus", "NV"},
    {"raise", "V"}, {"leak", "VN"}, {"drive", "VN"}, {"silence", "VN"},
    {"used", "V"}, {"based", "V"},
};

} // namespace detail

/// Word to admissible-tag lookup used by the tagger and lemmatizer.
class Lexicon {
public:
    Lexicon() = default;

    static const Lexicon& builtin() {
        static const Lexicon lex = [] {
            Lexicon l;
            for (const auto& e : detail::kOpenClass) l.entries_.insert_or_assign(e.word, detail::entry_from_codes(e.codes));
            for (const auto& e : detail::kClosedClass) {
                l.entries_.insert_or_assign(e.word, detail::entry_from_codes(e.codes));
                l.closed_.insert(e.word);
            }
            return l;
        }();
        return lex;
    }

    const LexEntry* find(std::string_view word) const {
        auto it = entries_.find(std::string(word));
        return it == entries_.end() ? nullptr : &it->second;
    }

    bool contains(std::string_view word, Pos p) const {
        const LexEntry* e = find(word);
        return e != nullptr && e->allows(p);
    }

    bool is_closed_class(std::string_view word) const { return closed_.count(std::string(word)) != 0; }

    void add(std::string word, LexEntry entry) { entries_.insert_or_assign(std::move(word), entry); }

    std::size_t size() const { return entries_.size(); }

    /// Adds open-class words from WordNet index.{noun,verb,adj,adv}. Curated
    /// entries win; the primary tag of a new word is the POS with the largest
    /// tagsense_cnt.
    void augment_from_wordnet(const std::filesystem::path& dir) {
        struct Seen {
            std::uint8_t mask = 0;
            long best = -1;
            Pos primary = Pos::Noun;
        };
        std::unordered_map<std::string, Seen> seen;
        const std::array<std::pair<const char*, Pos>, 4> files{
            {{"index.noun", Pos::Noun}, {"index.verb", Pos::Verb}, {"index.adj", Pos::Adj}, {"index.adv", Pos::Adv}}};
        for (const auto& [name, pos] : files) {
            const auto path = dir / name;
            std::ifstream in(path);
            if (!in) {
                if (pos == Pos::Adj || pos == Pos::Adv) continue;
                throw IoError(path.string(), "cannot open WordNet index file");
            }
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == ' ') continue;
                std::istringstream fields(line);
                std::string lemma, p;
                long synset_cnt = 0, p_cnt = 0;
                fields >> lemma >> p >> synset_cnt >> p_cnt;
                for (long i = 0; i < p_cnt; ++i) {
                    std::string sym;
                    fields >> sym;
                }
                long sense_cnt = 0, tagsense_cnt = 0;
                fields >> sense_cnt >> tagsense_cnt;
                if (lemma.find('_') != std::string::npos) continue;
                auto& s = seen[lemma];
                s.mask |= static_cast<std::uint8_t>(1u << static_cast<int>(pos));
                if (tagsense_cnt > s.best) {
                    s.best = tagsense_cnt;
                    s.primary = pos;
                }
            }
        }
        for (auto& [word, s] : seen) {
            if (entries_.count(word)) continue;
            entries_.emplace(word, LexEntry{s.primary, s.mask});
        }
    }

private:
    std::unordered_map<std::string, LexEntry> entries_;
    std::unordered_set<std::string> closed_;
};

} // namespace tracefacts
