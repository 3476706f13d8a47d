#include "ca/llm.hpp"

#include "ca/error.hpp"
#include "ca/text.hpp"
#include "ca/util.hpp"

#include <httplib.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace ca::llm {

using nlohmann::json;

std::string_view to_string(Expects e) {
    switch (e) {
        case Expects::free_text: return "free_text";
        case Expects::numbered_list: return "numbered_list";
        case Expects::labeled_summary: return "labeled_summary";
        case Expects::verbatim_choice: return "verbatim_choice";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// registry

namespace {

const char* const kSummarizeBody =
    "Summarise the following conversation between a chatbot and a person, and state what the agent picking up "
    "the conversation needs to do.\n"
    "---\n"
    "{transcript}\n"
    "---\n"
    "Use this format:\n"
    "Agent Action Required:\n"
    "Summary:";

}  // namespace

PromptRegistry PromptRegistry::builtin() {
    PromptRegistry r;
    r.add({"gen_intents", "Answer with a numbered list, one intent name per line.",
           "For designing a chatbot, give me a list of {n} most prominent intents in a conversation about "
           "{domain} between a client and an agent.",
           std::nullopt, Expects::numbered_list});
    r.add({"gen_utterances", "Answer with a numbered list, one utterance per line.",
           "Write {n} varied utterances to train a chatbot intent called {intent}, which is for {description}. "
           "{constraints}",
           std::nullopt, Expects::numbered_list});
    r.add({"gen_entities", "Answer with a comma-separated list or a numbered list of entity names.",
           "For designing a chatbot in the {domain} domain, give me a list of relevant named entities that the "
           "NLP back-end of the chatbot should be able to extract.",
           std::nullopt, Expects::free_text});
    r.add({"gen_synonyms", "Answer with a comma-separated list or a numbered list of terms.",
           "For designing a chatbot in the domain of {domain}, give me a synonym list for the word “{term}”.",
           std::nullopt, Expects::free_text});
    r.add({"gen_persona", "", "Describe the traits of a good {role} in max. 100 words.", std::nullopt,
           Expects::free_text});
    r.add({"localize",
           "Start each language block with the language name and a colon. Keep the statement numbering running "
           "across languages.",
           "Translate these {count} statements into {languages}.\n{statements}", std::nullopt,
           Expects::numbered_list});
    r.add({"autocorrect", "Reply with the corrected utterance only.",
           "Please rephrase the following utterance into orthographically and grammatically correct American "
           "English: {utterance}",
           std::nullopt, Expects::free_text});
    r.add({"out_of_scope",
           "You are a {role}. Answer general-knowledge questions briefly. If the question asks for financial, "
           "legal or investment advice, reply with exactly REFUSED.",
           "{question}", std::nullopt, Expects::free_text});
    r.add({"disambiguation", "Reply with the question only.",
           "A client of a chatbot for {domain} wrote: \"{utterance}\". This could mean \"{option_a}\" "
           "({description_a}) or \"{option_b}\" ({description_b}). Write one short question that asks the client "
           "which of the two they mean and names both options.",
           std::nullopt, Expects::free_text});
    r.add({"rephrase", "Reply with the rephrased statement only. Keep every number and name exactly as written.",
           "Rephrase the following chatbot statement {directive}, keeping its meaning: \"{text}\"", std::nullopt,
           Expects::free_text});
    r.add({"closed_qa", "",
           "For each question literally answer one of the below answers in exactly that wording, if those "
           "answers are suitable. If none of the below answers are a suitable answer to the question answer: "
           "“{default_answer}”.\n{answers}\nUser: {question}",
           std::nullopt, Expects::verbatim_choice});
    r.add({"summarize", "", kSummarizeBody, std::nullopt, Expects::labeled_summary});
    r.add({"summarize_strict",
           "Answer with exactly two labelled parts and nothing else. The first starts with \"Agent Action "
           "Required:\", the second starts with \"Summary:\".",
           std::string(kSummarizeBody) + "\nBoth labels are mandatory.", std::nullopt, Expects::labeled_summary});
    return r;
}

void PromptRegistry::add(PromptTemplate t) {
    if (t.id.empty() || text::trim(t.body).empty())
        throw Error(ErrorKind::ValidationError, "prompt template needs an id and a body", {t.id});
    templates_[t.id] = std::move(t);
}

void PromptRegistry::apply(const std::vector<PromptOverride>& overrides) {
    for (const auto& o : overrides) {
        auto it = templates_.find(o.id);
        if (it == templates_.end()) {
            add({o.id, o.system, o.body, std::nullopt, Expects::free_text});
            continue;
        }
        if (!o.body.empty()) it->second.body = o.body;
        if (!o.system.empty()) it->second.system = o.system;
    }
}

const PromptTemplate* PromptRegistry::find(std::string_view id) const {
    auto it = templates_.find(id);
    return it == templates_.end() ? nullptr : &it->second;
}

const PromptTemplate& PromptRegistry::get(std::string_view id) const {
    const auto* t = find(id);
    if (!t) throw Error(ErrorKind::TemplateUnknown, std::string(id), {std::string(id)});
    return *t;
}

std::vector<std::string> PromptRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : templates_) out.push_back(id);
    return out;
}

std::string prompt_hash(std::string_view rendered) { return text::sha256_hex(text::squash_whitespace(rendered)); }

RenderedPrompt render_prompt(const PromptRegistry& registry, std::string_view id,
                             const placeholder::Bindings& bindings) {
    const auto& t = registry.get(id);
    RenderedPrompt out;
    out.template_id = t.id;
    out.system = placeholder::substitute(t.system, bindings);
    out.prompt = placeholder::substitute(t.body, bindings);
    out.hash = prompt_hash(out.prompt);
    return out;
}

// ---------------------------------------------------------------------------
// mock provider

MockProvider::MockProvider(std::vector<Fixture> fixtures, bool strict) : strict_(strict) {
    for (auto& f : fixtures) responses_[{f.template_id, f.prompt_hash}] = std::move(f.response);
}

std::vector<Fixture> MockProvider::parse_fixtures(std::string_view yaml) {
    std::vector<Fixture> out;
    try {
        const YAML::Node root = YAML::Load(std::string(yaml));
        if (!root || root.IsNull()) return out;
        if (!root.IsSequence()) throw Error(ErrorKind::FixtureParseError, "fixtures must be a list");
        for (const auto& node : root) {
            if (!node.IsMap() || !node["template_id"] || !node["prompt_hash"] || !node["response"])
                throw Error(ErrorKind::FixtureParseError,
                            "fixture at line " + std::to_string(node.Mark().line + 1) +
                                " needs template_id, prompt_hash and response");
            Fixture f;
            f.template_id = node["template_id"].as<std::string>();
            f.prompt_hash = node["prompt_hash"].as<std::string>();
            if (node["prompt_excerpt"]) f.prompt_excerpt = node["prompt_excerpt"].as<std::string>();
            f.response = node["response"].as<std::string>();
            out.push_back(std::move(f));
        }
    } catch (const YAML::Exception& e) {
        throw Error(ErrorKind::FixtureParseError, e.what());
    }
    return out;
}

std::unique_ptr<MockProvider> MockProvider::load(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "fixtures file not found: " + path.string(), {path.string()});
    std::stringstream ss;
    ss << in.rdbuf();
    return std::make_unique<MockProvider>(parse_fixtures(ss.str()), strict);
}

std::string MockProvider::miss_marker(const ProviderRequest& request) {
    return "[mock: no fixture for " + request.template_id + " " + request.prompt_hash + "]";
}

std::string MockProvider::complete(const ProviderRequest& request) {
    auto it = responses_.find({request.template_id, request.prompt_hash});
    if (it != responses_.end()) return it->second;
    if (strict_)
        throw Error(ErrorKind::MissingFixture, "no fixture for " + request.template_id + " " + request.prompt_hash,
                    {request.template_id, request.prompt_hash, request.prompt});
    return miss_marker(request);
}

// ---------------------------------------------------------------------------
// http provider

HttpProvider::HttpProvider(HttpSettings settings, Sleeper sleep)
    : settings_(std::move(settings)), sleep_(std::move(sleep)) {
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

namespace {

struct Url {
    std::string base;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (scheme == std::string::npos)
        throw Error(ErrorKind::ValidationError, "provider endpoint must be an absolute URL: " + url);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

}  // namespace

std::string HttpProvider::complete(const ProviderRequest& request) {
    const Url url = split_url(settings_.endpoint);
    json body;
    if (!settings_.model.empty()) body["model"] = settings_.model;
    body["messages"] = json::array();
    for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = request.params.temperature;
    body["top_p"] = request.params.top_p;
    body["max_tokens"] = request.params.max_response_tokens;
    body["frequency_penalty"] = request.params.frequency_penalty;
    body["presence_penalty"] = request.params.presence_penalty;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!settings_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + settings_.api_key);
        headers.emplace("api-key", settings_.api_key);
    }

    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(settings_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(settings_.timeout - seconds);

    last_attempts_ = 0;
    for (int attempt = 0;; ++attempt) {
        ++last_attempts_;
        httplib::Client client(url.base);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());
        auto res = client.Post(url.path, headers, payload, "application/json");

        bool retryable = false;
        std::optional<Error> failure;
        if (!res) {
            failure = Error(ErrorKind::ProviderTimeout, "provider request failed: " + httplib::to_string(res.error()));
            retryable = true;
        } else if (res->status < 200 || res->status >= 300) {
            failure = Error(ErrorKind::ProviderHttpError, "provider returned HTTP " + std::to_string(res->status),
                            {res->body}, res->status);
            retryable = res->status == 429 || res->status >= 500;
        } else {
            try {
                const json reply = json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const json::exception& e) {
                throw Error(ErrorKind::ProviderHttpError, std::string("malformed provider response: ") + e.what(),
                            {res->body}, res->status);
            }
        }
        if (!retryable || attempt >= settings_.max_retries) throw *failure;
        sleep_(settings_.backoff * (1 << attempt));
    }
}

// ---------------------------------------------------------------------------
// audit log

namespace {

json params_json(const GenerationParams& p) {
    return {{"temperature", p.temperature},
            {"top_p", p.top_p},
            {"max_response_tokens", p.max_response_tokens},
            {"frequency_penalty", p.frequency_penalty},
            {"presence_penalty", p.presence_penalty},
            {"history_window", p.history_window}};
}

}  // namespace

std::string to_jsonl(const Exchange& e) {
    json j;
    j["id"] = e.id;
    j["template_id"] = e.template_id;
    j["prompt"] = e.prompt;
    j["prompt_hash"] = e.prompt_hash;
    j["messages"] = json::array();
    for (const auto& m : e.messages) j["messages"].push_back({{"role", m.role}, {"content", m.content}});
    j["params"] = params_json(e.params);
    j["provider"] = e.provider;
    j["response"] = e.response ? json(*e.response) : json(nullptr);
    j["error"] = e.error ? json(*e.error) : json(nullptr);
    j["latency_ms"] = e.latency_ms;
    j["timestamp"] = e.timestamp;
    return j.dump();
}

Exchange exchange_from_jsonl(std::string_view line) {
    const json j = json::parse(line);
    Exchange e;
    e.id = j.at("id").get<std::string>();
    e.template_id = j.at("template_id").get<std::string>();
    e.prompt = j.at("prompt").get<std::string>();
    e.prompt_hash = j.at("prompt_hash").get<std::string>();
    for (const auto& m : j.at("messages")) e.messages.push_back({m.at("role"), m.at("content")});
    const auto& p = j.at("params");
    e.params.temperature = p.at("temperature");
    e.params.top_p = p.at("top_p");
    e.params.max_response_tokens = p.at("max_response_tokens");
    e.params.frequency_penalty = p.at("frequency_penalty");
    e.params.presence_penalty = p.at("presence_penalty");
    e.params.history_window = p.at("history_window");
    e.provider = j.at("provider").get<std::string>();
    if (!j.at("response").is_null()) e.response = j.at("response").get<std::string>();
    if (!j.at("error").is_null()) e.error = j.at("error").get<std::string>();
    e.latency_ms = j.at("latency_ms");
    e.timestamp = j.at("timestamp").get<std::string>();
    return e;
}

AuditLog::AuditLog(std::filesystem::path path) : path_(std::move(path)) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
}

void AuditLog::append(const Exchange& e) {
    std::lock_guard lock(mutex_);
    records_.push_back(e);
    if (!path_) return;
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw Error(ErrorKind::IoError, "cannot append to audit log " + path_->string());
    out << to_jsonl(e) << '\n';
    out.flush();
}

std::vector<Exchange> AuditLog::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t AuditLog::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

// ---------------------------------------------------------------------------
// gateway

Gateway::Gateway(PromptRegistry registry, std::shared_ptr<Provider> provider, std::shared_ptr<AuditLog> log)
    : registry_(std::move(registry)), provider_(std::move(provider)), log_(std::move(log)) {
    if (!log_) log_ = std::make_shared<AuditLog>();
}

Completion Gateway::complete(std::string_view template_id, const placeholder::Bindings& bindings,
                             const std::vector<Message>& context, const std::optional<GenerationParams>& params) {
    Exchange e;
    e.id = random_hex(16);
    e.template_id = std::string(template_id);
    e.provider = provider_ ? provider_->id() : "none";
    e.timestamp = utc_timestamp();
    const auto started = std::chrono::steady_clock::now();
    auto finish = [&] {
        e.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                             started)
                           .count();
        log_->append(e);
    };

    try {
        const auto& t = registry_.get(template_id);
        e.params = params.value_or(t.params_override.value_or(GenerationParams{}));
        const RenderedPrompt rendered = render_prompt(registry_, template_id, bindings);
        e.prompt = rendered.prompt;
        e.prompt_hash = rendered.hash;

        ProviderRequest request;
        request.template_id = rendered.template_id;
        request.prompt = rendered.prompt;
        request.prompt_hash = rendered.hash;
        request.params = e.params;
        if (!rendered.system.empty()) request.messages.push_back({"system", rendered.system});
        const auto window = static_cast<std::size_t>(std::max(e.params.history_window, 0));
        const std::size_t first = context.size() > window ? context.size() - window : 0;
        for (std::size_t i = first; i < context.size(); ++i) request.messages.push_back(context[i]);
        request.messages.push_back({"user", rendered.prompt});
        e.messages = request.messages;

        if (!provider_) throw Error(ErrorKind::ProviderHttpError, "no provider configured");
        std::string response = text::trim_right(provider_->complete(request));
        e.response = response;
        finish();
        return {std::move(response), e.id};
    } catch (const Error& err) {
        e.error = err.what();
        finish();
        throw;
    }
}

std::shared_ptr<Provider> make_provider(const ProviderSettings& settings, const std::filesystem::path& project_dir) {
    if (settings.kind == "mock") {
        if (settings.fixtures.empty()) return std::make_shared<MockProvider>(std::vector<Fixture>{}, settings.strict);
        std::filesystem::path path = settings.fixtures;
        if (path.is_relative()) path = project_dir / path;
        return MockProvider::load(path, settings.strict);
    }
    if (settings.kind == "http") {
        HttpSettings http;
        http.endpoint = settings.endpoint;
        http.model = settings.model;
        if (const char* key = std::getenv(settings.credential_env.c_str())) http.api_key = key;
        http.timeout = std::chrono::milliseconds(settings.timeout_ms);
        http.max_retries = settings.max_retries;
        return std::make_shared<HttpProvider>(std::move(http));
    }
    throw Error(ErrorKind::ValidationError, "unknown provider kind: " + settings.kind, {settings.kind});
}

// ---------------------------------------------------------------------------
// parsing

std::optional<std::string> numbered_item(std::string_view raw) {
    const std::string line = text::trim(raw);
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) return std::nullopt;
    return text::trim(std::string_view(line).substr(i + 1));
}

std::vector<std::string> parse_numbered_list(std::string_view input) {
    std::vector<std::string> items;
    for (const auto& line : text::split_lines(input))
        if (auto item = numbered_item(line); item && !item->empty()) items.push_back(std::move(*item));
    if (items.empty()) throw Error(ErrorKind::EmptyList, "no numbered items in response", {std::string(input)});
    return items;
}

}  // namespace ca::llm
