#include "ca/accelerator.hpp"

#include "ca/error.hpp"
#include "ca/nlu.hpp"
#include "ca/text.hpp"
#include "ca/util.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <set>

namespace fs = std::filesystem;

namespace ca::accelerator {

std::string_view to_string(ItemKind k) {
    switch (k) {
        case ItemKind::intent: return "intent";
        case ItemKind::utterance: return "utterance";
        case ItemKind::entity: return "entity";
        case ItemKind::synonym: return "synonym";
        case ItemKind::persona_trait: return "persona_trait";
        case ItemKind::template_localization: return "template_localization";
    }
    return "?";
}

std::string_view to_string(ItemStatus s) {
    switch (s) {
        case ItemStatus::pending: return "pending";
        case ItemStatus::approved: return "approved";
        case ItemStatus::rejected: return "rejected";
    }
    return "?";
}

ItemKind item_kind_from_string(std::string_view s) {
    for (auto k : {ItemKind::intent, ItemKind::utterance, ItemKind::entity, ItemKind::synonym,
                   ItemKind::persona_trait, ItemKind::template_localization})
        if (to_string(k) == s) return k;
    throw Error(ErrorKind::ParseError, "unknown staged item kind '" + std::string(s) + "'");
}

ItemStatus item_status_from_string(std::string_view s) {
    for (auto st : {ItemStatus::pending, ItemStatus::approved, ItemStatus::rejected})
        if (to_string(st) == s) return st;
    throw Error(ErrorKind::ParseError, "unknown staged item status '" + std::string(s) + "'");
}

std::vector<StagedItem> Staging::pending() const {
    std::vector<StagedItem> out;
    for (const auto& i : items)
        if (i.status == ItemStatus::pending) out.push_back(i);
    return out;
}

StagedItem* Staging::find(std::string_view id) {
    for (auto& i : items)
        if (i.id == id) return &i;
    return nullptr;
}

Staging load_staging(const fs::path& dir) {
    Staging s;
    const fs::path path = dir / "staging.yaml";
    if (!fs::exists(path)) return s;
    try {
        const YAML::Node root = YAML::LoadFile(path.string());
        if (!root || root.IsNull()) return s;
        if (root["next_id"]) s.next_id = root["next_id"].as<std::uint64_t>();
        for (const auto& n : root["items"]) {
            StagedItem i;
            i.id = n["id"].as<std::string>();
            i.kind = item_kind_from_string(n["kind"].as<std::string>());
            i.target = n["target"].as<std::string>("");
            i.content = n["content"].as<std::string>("");
            i.created_at = n["created_at"].as<std::string>("");
            i.status = item_status_from_string(n["status"].as<std::string>("pending"));
            i.exchange_id = n["exchange_id"].as<std::string>("");
            s.items.push_back(std::move(i));
        }
    } catch (const YAML::Exception& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": " + e.what(), {path.string()});
    }
    return s;
}

void save_staging(const Staging& staging, const fs::path& dir) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "next_id" << YAML::Value << staging.next_id;
    out << YAML::Key << "items" << YAML::Value << YAML::BeginSeq;
    for (const auto& i : staging.items) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << i.id;
        out << YAML::Key << "kind" << YAML::Value << std::string(to_string(i.kind));
        out << YAML::Key << "target" << YAML::Value << i.target;
        out << YAML::Key << "content" << YAML::Value << YAML::DoubleQuoted << i.content;
        out << YAML::Key << "created_at" << YAML::Value << i.created_at;
        out << YAML::Key << "status" << YAML::Value << std::string(to_string(i.status));
        out << YAML::Key << "exchange_id" << YAML::Value << i.exchange_id;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    write_file_atomic(dir / "staging.yaml", std::string(out.c_str()) + "\n");
}

// ---------------------------------------------------------------------------
// parsing helpers

namespace {

std::string strip_item(std::string s) {
    s = text::trim(s);
    for (std::string_view tail : {"...", "…"})
        while (s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0)
            s = text::trim(s.substr(0, s.size() - tail.size()));
    while (!s.empty() && (s.back() == '.' || s.back() == ';')) s.pop_back();
    for (std::string_view q : {"\"", "“", "”", "'"}) {
        if (s.size() >= q.size() && s.compare(0, q.size(), q) == 0) s.erase(0, q.size());
        if (s.size() >= q.size() && s.compare(s.size() - q.size(), q.size(), q) == 0) s.erase(s.size() - q.size());
    }
    return text::trim(s);
}

std::string folded(std::string_view s) { return text::lower(text::squash_whitespace(s)); }

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace

std::vector<std::string> parse_term_list(std::string_view input) {
    std::vector<std::string> items;
    bool numbered = false;
    for (const auto& line : text::split_lines(input)) {
        if (auto item = llm::numbered_item(line)) {
            numbered = true;
            if (auto s = strip_item(*item); !s.empty()) items.push_back(std::move(s));
        }
    }
    if (!numbered) {
        std::string flat;
        for (const auto& line : text::split_lines(input)) flat += text::trim(line) + " ";
        std::vector<std::string> parts;
        std::string cur;
        for (char c : flat) {
            if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(cur);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            std::string p = text::trim(parts[i]);
            if (text::starts_with_icase(p, "and ")) p = p.substr(4);
            const auto pos = p.find(" and ");
            if (i + 1 == parts.size() && parts.size() >= 2 && pos != std::string::npos) {
                if (auto a = strip_item(p.substr(0, pos)); !a.empty()) items.push_back(std::move(a));
                p = p.substr(pos + 5);
            }
            if (auto s = strip_item(p); !s.empty()) items.push_back(std::move(s));
        }
    }
    if (items.empty()) throw Error(ErrorKind::EmptyList, "no list items in response", {std::string(input)});
    return items;
}

std::string intent_name(std::string_view item) {
    std::string s = strip_item(std::string(item));
    // Explanations and alternatives go; "Pay a bill or set up ..." becomes pay_bill.
    for (std::string_view cut : {" - ", " \xe2\x80\x93 ", " \xe2\x80\x94 ", ": ", " (", " or ", " between "}) {
        const auto pos = s.find(cut);
        if (pos != std::string::npos) s = s.substr(0, pos);
    }
    std::vector<std::string> words;
    for (auto& w : split_words(s)) {
        const std::string l = text::lower(w);
        if (l != "a" && l != "an" && l != "the") words.push_back(std::move(w));
    }
    return text::slugify(text::join(words, " "));
}

std::string singular(std::string_view slug) {
    std::string s(slug);
    const auto pos = s.rfind('_');
    std::string head = pos == std::string::npos ? "" : s.substr(0, pos + 1);
    std::string last = pos == std::string::npos ? s : s.substr(pos + 1);
    auto ends = [&](std::string_view t) { return last.size() > t.size() && last.compare(last.size() - t.size(), t.size(), t) == 0; };
    if (ends("ies"))
        last = last.substr(0, last.size() - 3) + "y";
    else if (ends("s") && !ends("ss") && !ends("us"))
        last.pop_back();
    return head + last;
}

std::vector<std::string> extract_traits(std::string_view description) {
    static const std::set<std::string> subjects = {"they", "he", "she", "a", "an", "the"};
    static const std::set<std::string> verbs = {"possesses", "possess", "has",        "have",     "is",
                                                "are",       "maintain", "maintains", "demonstrate",
                                                "demonstrates", "show",  "shows",     "display",  "displays",
                                                "exhibit",   "exhibits", "practice",  "practices", "build",
                                                "builds"};
    static const std::set<std::string> connectives = {"additionally", "also", "furthermore", "moreover", "finally",
                                                      "overall"};
    std::vector<std::string> sentences;
    std::string cur;
    const std::string flat = text::squash_whitespace(description);
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const char c = flat[i];
        if ((c == '.' || c == '!' || c == '?') && (i + 1 == flat.size() || flat[i + 1] == ' ')) {
            sentences.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!text::trim(cur).empty()) sentences.push_back(cur);

    std::vector<std::string> traits;
    for (const auto& sentence : sentences) {
        std::vector<std::string> clauses;
        std::string clause;
        for (char c : sentence) {
            if (c == ',' || c == ';') {
                clauses.push_back(clause);
                clause.clear();
            } else {
                clause.push_back(c);
            }
        }
        clauses.push_back(clause);
        for (auto& raw : clauses) {
            auto words = split_words(text::trim(raw));
            if (!words.empty() && (text::lower(words[0]) == "and" || text::lower(words[0]) == "or"))
                words.erase(words.begin());
            if (words.size() == 1 && connectives.count(text::lower(words[0]))) continue;
            if (!words.empty() && subjects.count(text::lower(words[0]))) {
                for (std::size_t k = 1; k < words.size() && k < 9; ++k) {
                    if (verbs.count(text::lower(words[k]))) {
                        words.erase(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(k) + 1);
                        break;
                    }
                }
            }
            while (!words.empty() && connectives.count(text::lower(words[0]))) words.erase(words.begin());
            // "..., practice discretion" continues the previous subject.
            if (words.size() > 1 && verbs.count(text::lower(words[0]))) words.erase(words.begin());
            while (!words.empty() && (text::lower(words[0]) == "a" || text::lower(words[0]) == "an"))
                words.erase(words.begin());
            const std::string trait = text::join(words, " ");
            if (!trait.empty()) traits.push_back(trait);
        }
    }
    return traits;
}

std::vector<std::vector<std::string>> parse_localization(std::string_view input,
                                                         const std::vector<std::string>& languages) {
    std::vector<std::size_t> by_length(languages.size());
    for (std::size_t i = 0; i < languages.size(); ++i) by_length[i] = i;
    std::sort(by_length.begin(), by_length.end(),
              [&](std::size_t a, std::size_t b) { return languages[a].size() > languages[b].size(); });

    std::vector<std::vector<std::string>> out(languages.size());
    std::optional<std::size_t> current;
    for (const auto& raw : text::split_lines(input)) {
        std::string line = text::trim(raw);
        for (std::size_t idx : by_length) {
            const std::string header = languages[idx] + ":";
            if (text::starts_with_icase(line, header)) {
                current = idx;
                line = text::trim(std::string_view(line).substr(header.size()));
                break;
            }
        }
        if (!current) continue;
        if (auto item = llm::numbered_item(line); item && !item->empty()) out[*current].push_back(text::trim(*item));
    }
    for (std::size_t i = 0; i < languages.size(); ++i)
        if (out[i].empty())
            throw Error(ErrorKind::FormatParseError, "no translations for " + languages[i], {std::string(input)});
    return out;
}

std::string count_word(std::size_t n) {
    static const char* const words[] = {"zero", "one", "two",   "three", "four",   "five",  "six",
                                        "seven", "eight", "nine", "ten",  "eleven", "twelve"};
    return n <= 12 ? words[n] : std::to_string(n);
}

std::string join_and(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
        out += items[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// workspace

Workspace::Workspace(fs::path dir, llm::Gateway* gateway)
    : dir_(std::move(dir)), config_(load_project(dir_)), staging_(load_staging(dir_)), gateway_(gateway) {}

Workspace::Workspace(fs::path dir, ProjectConfig config, Staging staging, llm::Gateway* gateway)
    : dir_(std::move(dir)), config_(std::move(config)), staging_(std::move(staging)), gateway_(gateway) {}

llm::Gateway& Workspace::gateway() {
    if (!gateway_) throw Error(ErrorKind::Precondition, "no LLM provider configured");
    return *gateway_;
}

bool Workspace::pending_exists(ItemKind kind, std::string_view target, std::string_view content) const {
    const std::string key = folded(content);
    return std::any_of(staging_.items.begin(), staging_.items.end(), [&](const StagedItem& i) {
        return i.status == ItemStatus::pending && i.kind == kind && i.target == target && folded(i.content) == key;
    });
}

StagedItem& Workspace::stage(GenReport& report, ItemKind kind, std::string target, std::string content,
                             const std::string& exchange_id) {
    StagedItem item;
    item.id = std::to_string(staging_.next_id++);
    item.kind = kind;
    item.target = std::move(target);
    item.content = std::move(content);
    item.created_at = utc_timestamp();
    item.exchange_id = exchange_id;
    staging_.items.push_back(item);
    report.staged.push_back(item);
    return staging_.items.back();
}

void Workspace::persist_staging() { save_staging(staging_, dir_); }

GenReport Workspace::gen_intents(std::string_view domain, int n) {
    if (n < 1) throw Error(ErrorKind::Precondition, "count must be at least 1");
    GenReport report;
    auto c = gateway().complete("gen_intents", {{"n", std::to_string(n)}, {"domain", std::string(domain)}});
    report.raw = c.text;
    std::vector<std::string> items;
    try {
        items = llm::parse_numbered_list(c.text);
    } catch (const Error& e) {
        throw Error(e.kind(), e.what(), {c.text});
    }
    std::set<std::string> seen;
    for (const auto& item : items) {
        if (report.staged.size() >= static_cast<std::size_t>(n)) break;
        const std::string name = intent_name(item);
        if (name.empty()) continue;
        if (config_.intent(name) || !seen.insert(name).second || pending_exists(ItemKind::intent, name, name)) {
            report.dropped.push_back(name);
            continue;
        }
        stage(report, ItemKind::intent, name, name, c.exchange_id);
    }
    if (report.staged.empty()) report.warnings.push_back("every generated intent already exists");
    persist_staging();
    return report;
}

GenReport Workspace::gen_utterances(std::string_view intent, int n, std::string_view constraints) {
    if (n < 1) throw Error(ErrorKind::Precondition, "count must be at least 1");
    const IntentDef* def = config_.intent(intent);
    if (!def) throw Error(ErrorKind::UnknownIntent, std::string(intent), {std::string(intent)});
    GenReport report;
    const std::string description = def->description.empty() ? std::string(intent) : def->description;
    auto c = gateway().complete("gen_utterances", {{"n", std::to_string(n)},
                                                   {"intent", def->name},
                                                   {"description", description},
                                                   {"constraints", std::string(constraints)}});
    report.raw = c.text;
    std::vector<std::string> items;
    try {
        items = llm::parse_numbered_list(c.text);
    } catch (const Error& e) {
        throw Error(e.kind(), e.what(), {c.text});
    }
    std::set<std::string> existing;
    for (const auto& ex : def->examples) existing.insert(text::squash_whitespace(ex.text));
    for (const auto& item : items) {
        const std::string utterance = text::squash_whitespace(item);
        if (existing.count(utterance) || pending_exists(ItemKind::utterance, def->name, utterance)) {
            report.dropped.push_back(utterance);
            continue;
        }
        existing.insert(utterance);
        stage(report, ItemKind::utterance, def->name, utterance, c.exchange_id);
    }
    persist_staging();
    return report;
}

GenReport Workspace::gen_entities(std::string_view domain) {
    GenReport report;
    auto c = gateway().complete("gen_entities", {{"domain", std::string(domain)}});
    report.raw = c.text;
    std::vector<std::string> terms;
    try {
        terms = parse_term_list(c.text);
    } catch (const Error& e) {
        throw Error(e.kind(), e.what(), {c.text});
    }
    std::set<std::string> known;
    for (const auto& e : config_.entities) known.insert(singular(e.name));
    for (const auto& i : staging_.items)
        if (i.kind == ItemKind::entity && i.status == ItemStatus::pending) known.insert(singular(i.target));
    for (const auto& term : terms) {
        const std::string name = text::slugify(term);
        if (name.empty()) continue;
        if (!known.insert(singular(name)).second) {
            report.dropped.push_back(term);
            continue;
        }
        stage(report, ItemKind::entity, name, term, c.exchange_id);
    }
    persist_staging();
    return report;
}

GenReport Workspace::gen_synonyms(std::string_view entity, std::string_view term) {
    const auto canonical = nlu::synonym_canonical(config_, entity, term);
    if (!canonical)
        throw Error(ErrorKind::Precondition,
                    "'" + std::string(term) + "' is not a value of entity " + std::string(entity),
                    {std::string(term)});
    const EntityDef* def = config_.entity(entity);
    GenReport report;
    auto c = gateway().complete("gen_synonyms", {{"domain", config_.domain}, {"term", std::string(term)}});
    report.raw = c.text;
    std::vector<std::string> terms;
    try {
        terms = parse_term_list(c.text);
    } catch (const Error& e) {
        throw Error(e.kind(), e.what(), {c.text});
    }
    // Pending synonyms claim their terms too, so two batches cannot collide.
    std::map<std::string, std::string> owner;
    for (const auto& v : def->values) {
        owner[folded(v.canonical)] = v.canonical;
        for (const auto& s : v.synonyms) owner[folded(s)] = v.canonical;
    }
    const std::string prefix = def->name + ":";
    for (const auto& i : staging_.items)
        if (i.kind == ItemKind::synonym && i.status == ItemStatus::pending && i.target.rfind(prefix, 0) == 0)
            owner.emplace(folded(i.content), i.target.substr(prefix.size()));
    const std::string target = prefix + *canonical;
    for (const auto& t : terms) {
        auto it = owner.find(folded(t));
        if (it != owner.end()) {
            if (it->second == *canonical)
                report.dropped.push_back(t);
            else
                report.flagged.push_back(t + " (already maps to " + it->second + ")");
            continue;
        }
        owner[folded(t)] = *canonical;
        stage(report, ItemKind::synonym, target, t, c.exchange_id);
    }
    persist_staging();
    return report;
}

GenReport Workspace::gen_persona(std::string_view role) {
    if (text::trim(role).empty()) throw Error(ErrorKind::Precondition, "role description is empty");
    GenReport report;
    auto c = gateway().complete("gen_persona", {{"role", text::trim(role)}});
    report.raw = c.text;
    const auto traits = extract_traits(c.text);
    if (traits.empty()) throw Error(ErrorKind::EmptyList, "no traits found in response", {c.text});
    std::set<std::string> known;
    for (const auto& t : config_.persona.traits) known.insert(folded(t));
    for (const auto& i : staging_.items)
        if (i.kind == ItemKind::persona_trait && i.status == ItemStatus::pending) known.insert(folded(i.content));
    for (const auto& t : traits) {
        if (!known.insert(folded(t)).second) {
            report.dropped.push_back(t);
            continue;
        }
        stage(report, ItemKind::persona_trait, "persona", t, c.exchange_id);
    }
    persist_staging();
    return report;
}

GenReport Workspace::localize(const std::vector<std::string>& keys, const std::vector<std::string>& locales) {
    if (keys.empty() || locales.empty()) throw Error(ErrorKind::Precondition, "need template keys and locales");
    for (const auto& l : locales)
        if (!config_.has_locale(l)) throw Error(ErrorKind::UndeclaredLocale, l, {l});

    std::vector<std::pair<std::string, std::size_t>> sources;  // key, number of texts
    std::vector<std::string> statements;
    for (const auto& key : keys) {
        const ResponseTemplate* t = config_.template_for(key);
        if (!t) throw Error(ErrorKind::UnknownTemplate, key, {key});
        const TemplateVariant* source = nullptr;
        for (const auto& v : t->variants)
            if (v.locale == config_.default_locale() && v.persona.empty()) source = &v;
        if (!source || source->texts.empty())
            throw Error(ErrorKind::Precondition, key + " has no default-locale text", {key});
        sources.emplace_back(key, source->texts.size());
        statements.insert(statements.end(), source->texts.begin(), source->texts.end());
    }
    std::string numbered;
    for (std::size_t i = 0; i < statements.size(); ++i)
        numbered += (i ? "\n" : "") + std::to_string(i + 1) + ". " + statements[i];

    std::vector<std::string> languages;
    for (const auto& l : locales) languages.push_back(locale_display_name(l));

    GenReport report;
    auto c = gateway().complete("localize", {{"count", count_word(statements.size())},
                                             {"languages", join_and(languages)},
                                             {"statements", numbered}});
    report.raw = c.text;
    std::vector<std::vector<std::string>> translated;
    try {
        translated = parse_localization(c.text, languages);
    } catch (const Error& e) {
        throw Error(e.kind(), e.what(), {c.text});
    }
    for (std::size_t li = 0; li < locales.size(); ++li) {
        if (translated[li].size() != statements.size()) {
            report.flagged.push_back(languages[li] + ": expected " + std::to_string(statements.size()) +
                                     " statements, got " + std::to_string(translated[li].size()));
            continue;
        }
        std::size_t offset = 0;
        for (const auto& [key, count] : sources) {
            std::vector<std::string> texts(translated[li].begin() + static_cast<std::ptrdiff_t>(offset),
                                           translated[li].begin() + static_cast<std::ptrdiff_t>(offset + count));
            offset += count;
            const std::string target = key + "@" + locales[li];
            const std::string content = text::join(texts, "\n");
            if (pending_exists(ItemKind::template_localization, target, content)) {
                report.dropped.push_back(target);
                continue;
            }
            stage(report, ItemKind::template_localization, target, content, c.exchange_id);
        }
    }
    persist_staging();
    return report;
}

std::vector<StagedItem*> Workspace::decide(const std::vector<std::string>& ids) {
    std::vector<StagedItem*> items;
    for (const auto& id : ids) {
        StagedItem* item = staging_.find(id);
        if (!item) throw Error(ErrorKind::UnknownItem, "no staged item " + id, {id});
        if (item->status != ItemStatus::pending)
            throw Error(ErrorKind::AlreadyDecided, "item " + id + " is already " + std::string(to_string(item->status)),
                        {id});
        items.push_back(item);
    }
    return items;
}

void Workspace::approve(const std::vector<std::string>& ids, const ApproveOptions& options) {
    const auto items = decide(ids);
    ProjectConfig next = config_;
    for (const StagedItem* item : items) {
        switch (item->kind) {
            case ItemKind::intent:
                if (!next.intent(item->target)) next.intents.push_back({item->target, "", "", {}});
                break;
            case ItemKind::utterance: {
                IntentDef* intent = next.intent(item->target);
                if (!intent) throw Error(ErrorKind::UnknownIntent, item->target, {item->id});
                intent->examples.push_back({item->content, next.default_locale(), Provenance::approved});
                break;
            }
            case ItemKind::entity: {
                if (next.entity(item->target)) break;
                EntityDef e;
                e.name = item->target;
                if (!options.entity_pattern.empty()) {
                    e.kind = EntityKind::pattern;
                    e.pattern = options.entity_pattern;
                }
                next.entities.push_back(std::move(e));
                break;
            }
            case ItemKind::synonym: {
                const auto colon = item->target.find(':');
                EntityDef* e = next.entity(item->target.substr(0, colon));
                if (!e || colon == std::string::npos) throw Error(ErrorKind::UnknownEntity, item->target, {item->id});
                const std::string canonical = item->target.substr(colon + 1);
                auto it = std::find_if(e->values.begin(), e->values.end(),
                                       [&](const GazetteerValue& v) { return v.canonical == canonical; });
                if (it == e->values.end()) throw Error(ErrorKind::UnknownEntity, item->target, {item->id});
                it->synonyms.push_back(item->content);
                break;
            }
            case ItemKind::persona_trait:
                next.persona.traits.push_back(item->content);
                break;
            case ItemKind::template_localization: {
                const auto at = item->target.rfind('@');
                ResponseTemplate* t = next.template_for(item->target.substr(0, at));
                if (!t || at == std::string::npos) throw Error(ErrorKind::UnknownTemplate, item->target, {item->id});
                const std::string locale = item->target.substr(at + 1);
                auto lines = text::split_lines(item->content);
                std::vector<std::string> texts;
                for (auto& l : lines)
                    if (!text::trim(l).empty()) texts.push_back(text::trim(l));
                auto v = std::find_if(t->variants.begin(), t->variants.end(), [&](const TemplateVariant& tv) {
                    return tv.locale == locale && tv.persona.empty();
                });
                if (v != t->variants.end())
                    v->texts = std::move(texts);
                else
                    t->variants.push_back({locale, "", std::move(texts)});
                break;
            }
        }
    }
    std::vector<std::string> errors;
    for (const auto& v : validate(next))
        if (v.severity == Severity::error) errors.push_back(v.to_string());
    if (!errors.empty())
        throw Error(ErrorKind::ValidationError, "approval would make the project invalid", errors);

    save_project(next, dir_);
    config_ = std::move(next);
    for (StagedItem* item : items) item->status = ItemStatus::approved;
    persist_staging();
}

void Workspace::reject(const std::vector<std::string>& ids) {
    for (StagedItem* item : decide(ids)) item->status = ItemStatus::rejected;
    persist_staging();
}

}  // namespace ca::accelerator
