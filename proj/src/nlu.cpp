#include "ca/nlu.hpp"

#include "ca/error.hpp"
#include "ca/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>

namespace ca::nlu {

std::vector<std::string> normalize(std::string_view input) {
    std::vector<std::string> out;
    for (auto& t : text::tokenize(text::nfc(input))) out.push_back(std::move(t.text));
    return out;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            dot += a[i].second * b[j].second;
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    for (const auto& [_, w] : a) na += w * w;
    for (const auto& [_, w] : b) nb += w * w;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

namespace {

SparseVector weigh(const std::map<std::string, std::size_t>& vocabulary, const std::vector<double>& idf,
                   const std::vector<std::string>& tokens) {
    std::map<std::size_t, double> counts;
    for (const auto& t : tokens) {
        auto it = vocabulary.find(t);
        if (it != vocabulary.end()) counts[it->second] += 1.0;
    }
    SparseVector v;
    double norm = 0.0;
    for (const auto& [idx, tf] : counts) {
        const double w = tf * idf[idx];
        v.emplace_back(idx, w);
        norm += w * w;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (auto& [_, w] : v) w /= norm;
    return v;
}

}  // namespace

SparseVector vectorize(const IntentModel& model, const std::vector<std::string>& tokens) {
    return weigh(model.vocabulary, model.idf, tokens);
}

IntentModel train(const ProjectConfig& config) {
    struct Doc {
        std::string intent;
        std::string text;
        std::vector<std::string> tokens;
    };
    std::vector<Doc> docs;
    for (const auto& intent : config.intents) {
        std::size_t usable = 0;
        for (const auto& ex : intent.examples) {
            if (!usable_for_training(ex.provenance)) continue;
            auto tokens = normalize(ex.text);
            if (tokens.empty()) continue;
            docs.push_back({intent.name, ex.text, std::move(tokens)});
            ++usable;
        }
        if (usable == 0)
            throw Error(ErrorKind::UntrainableIntent, intent.name + " has no human or approved examples",
                        {intent.name});
    }

    IntentModel model;
    model.tau_oos = config.thresholds.tau_oos;
    for (const auto& intent : config.intents) model.intents.push_back(intent.name);
    std::sort(model.intents.begin(), model.intents.end());

    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
        std::set<std::string> seen(d.tokens.begin(), d.tokens.end());
        for (const auto& t : seen) ++df[t];
    }
    std::size_t index = 0;
    for (const auto& [term, _] : df) model.vocabulary.emplace(term, index++);

    const double n = static_cast<double>(docs.size());
    model.idf.resize(model.vocabulary.size());
    for (const auto& [term, idx] : model.vocabulary)
        model.idf[idx] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[term]))) + 1.0;

    for (auto& d : docs)
        model.examples.push_back({d.intent, weigh(model.vocabulary, model.idf, d.tokens), std::move(d.text)});
    return model;
}

IntentPrediction classify(const IntentModel& model, std::string_view input, const ClassifyOptions& options) {
    const auto tokens = normalize(input);
    if (tokens.empty()) throw Error(ErrorKind::EmptyUtterance, "utterance has no alphanumeric content");
    const auto query = vectorize(model, tokens);

    auto allowed = [&](const std::string& intent) {
        return options.restrict_to.empty() || options.restrict_to.count(intent) > 0;
    };

    std::map<std::string, double> best;
    for (const auto& name : model.intents)
        if (allowed(name)) best[name] = 0.0;
    for (const auto& ex : model.examples) {
        if (!allowed(ex.intent)) continue;
        auto& score = best[ex.intent];
        score = std::max(score, cosine(query, ex.vector));
    }

    IntentPrediction out;
    for (const auto& [name, score] : best) out.ranked.push_back({name, score});
    std::stable_sort(out.ranked.begin(), out.ranked.end(), [](const ScoredIntent& a, const ScoredIntent& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.intent < b.intent;
    });
    if (options.top_k > 0 && out.ranked.size() > options.top_k) out.ranked.resize(options.top_k);
    if (!out.ranked.empty()) {
        out.confidence = out.ranked.front().score;
        if (out.confidence >= model.tau_oos) out.intent = out.ranked.front().intent;
    }
    return out;
}

// ---------------------------------------------------------------------------
// entities

namespace {

struct Candidate {
    EntityMatch match;
    std::size_t order = 0;
    bool preferred = false;
};

std::string currency_code(std::string word) {
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return std::tolower(c); });
    if (word == "$" || word == "usd" || word == "dollar" || word == "dollars") return "USD";
    if (word == "\xE2\x82\xAC" || word == "eur" || word == "euro" || word == "euros") return "EUR";
    if (word == "\xC2\xA3" || word == "gbp" || word == "pound" || word == "pounds") return "GBP";
    if (word == "chf" || word == "franc" || word == "francs") return "CHF";
    return {};
}

const char* const kMonths[] = {"january", "february", "march",     "april",   "may",      "june",
                               "july",    "august",   "september", "october", "november", "december"};

}  // namespace

std::string normalize_value(Normalizer normalizer, std::string_view raw) {
    switch (normalizer) {
        case Normalizer::none:
            return std::string(raw);
        case Normalizer::digits: {
            std::string out;
            for (char c : raw)
                if (std::isdigit(static_cast<unsigned char>(c))) out.push_back(c);
            return out;
        }
        case Normalizer::amount: {
            static const std::regex number(R"(\d[\d,]*(?:\.\d+)?)");
            static const std::regex word(R"([A-Za-z]+|\$|\xE2\x82\xAC|\xC2\xA3)");
            const std::string s(raw);
            std::smatch m;
            std::string value;
            if (std::regex_search(s, m, number)) {
                for (char c : m.str())
                    if (c != ',') value.push_back(c);
            }
            std::string code;
            for (auto it = std::sregex_iterator(s.begin(), s.end(), word); it != std::sregex_iterator(); ++it) {
                code = currency_code(it->str());
                if (!code.empty()) break;
            }
            return code.empty() ? value : value + " " + code;
        }
        case Normalizer::date: {
            static const std::regex iso(R"((\d{4})-(\d{2})-(\d{2}))");
            static const std::regex dm(R"((\d{1,2})\s+([A-Za-z]+)(?:\s+(\d{4}))?)");
            const std::string s(raw);
            std::smatch m;
            if (std::regex_search(s, m, iso)) return m.str(0);
            if (std::regex_search(s, m, dm)) {
                std::string month = m.str(2);
                std::transform(month.begin(), month.end(), month.begin(),
                               [](unsigned char c) { return std::tolower(c); });
                for (int i = 0; i < 12; ++i) {
                    if (month == kMonths[i]) {
                        char buf[16];
                        std::snprintf(buf, sizeof buf, "%02d-%02d", i + 1, std::stoi(m.str(1)));
                        return m[3].matched ? m.str(3) + "-" + buf : std::string("--") + buf;
                    }
                }
            }
            return s;
        }
    }
    return std::string(raw);
}

std::vector<EntityMatch> extract_entities(const ProjectConfig& config, std::string_view input,
                                          const ExtractOptions& options) {
    const std::string utterance = text::nfc(input);
    const auto tokens = text::tokenize(utterance);
    std::vector<Candidate> candidates;

    auto is_preferred = [&](const std::string& name) {
        return std::find(options.preferred.begin(), options.preferred.end(), name) != options.preferred.end();
    };

    for (std::size_t order = 0; order < config.entities.size(); ++order) {
        const auto& def = config.entities[order];
        const bool preferred = is_preferred(def.name);
        if (def.kind == EntityKind::pattern) {
            auto flags = std::regex::ECMAScript;
            if (def.case_insensitive) flags |= std::regex::icase;
            std::regex re;
            try {
                re = std::regex(def.pattern, flags);
            } catch (const std::regex_error&) {
                continue;  // rejected by validation; nothing to match
            }
            for (auto it = std::sregex_iterator(utterance.begin(), utterance.end(), re);
                 it != std::sregex_iterator(); ++it) {
                if (it->length(0) == 0) continue;
                const auto b = static_cast<std::size_t>(it->position(0));
                const auto e = b + static_cast<std::size_t>(it->length(0));
                EntityMatch m;
                m.entity = def.name;
                m.raw = it->str(0);
                m.start = text::codepoint_offset(utterance, b);
                m.end = text::codepoint_offset(utterance, e);
                m.value = normalize_value(def.normalizer, m.raw);
                m.extractor = EntityKind::pattern;
                candidates.push_back({std::move(m), order, preferred});
            }
            continue;
        }
        for (const auto& value : def.values) {
            std::vector<std::string> terms{value.canonical};
            terms.insert(terms.end(), value.synonyms.begin(), value.synonyms.end());
            for (const auto& term : terms) {
                const auto phrase = normalize(term);
                if (phrase.empty() || phrase.size() > tokens.size()) continue;
                for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
                    bool hit = true;
                    for (std::size_t k = 0; k < phrase.size() && hit; ++k) hit = tokens[i + k].text == phrase[k];
                    if (!hit) continue;
                    EntityMatch m;
                    m.entity = def.name;
                    m.start = tokens[i].start;
                    m.end = tokens[i + phrase.size() - 1].end;
                    m.raw = text::substr(utterance, m.start, m.end);
                    m.value = value.canonical;
                    m.extractor = EntityKind::gazetteer;
                    candidates.push_back({std::move(m), order, preferred});
                }
            }
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.match.start != b.match.start) return a.match.start < b.match.start;
        const auto la = a.match.end - a.match.start, lb = b.match.end - b.match.start;
        if (la != lb) return la > lb;
        if (a.preferred != b.preferred) return a.preferred;
        return a.order < b.order;
    });

    std::vector<EntityMatch> out;
    std::size_t covered = 0;
    for (auto& c : candidates) {
        if (!out.empty() && c.match.start < covered) continue;
        covered = c.match.end;
        out.push_back(std::move(c.match));
    }
    return out;
}

std::optional<std::string> synonym_canonical(const ProjectConfig& config, std::string_view entity,
                                             std::string_view term) {
    const EntityDef* def = config.entity(entity);
    if (!def) throw Error(ErrorKind::UnknownEntity, std::string(entity));
    if (def->kind != EntityKind::gazetteer)
        throw Error(ErrorKind::WrongEntityKind, std::string(entity) + " is a pattern entity");
    const std::string needle = text::lower(text::squash_whitespace(term));
    for (const auto& v : def->values) {
        if (text::lower(text::squash_whitespace(v.canonical)) == needle) return v.canonical;
        for (const auto& s : v.synonyms)
            if (text::lower(text::squash_whitespace(s)) == needle) return v.canonical;
    }
    return std::nullopt;
}

}  // namespace ca::nlu
