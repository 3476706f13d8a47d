#pragma once

#include "ca/placeholder.hpp"
#include "ca/project.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ca::llm {

struct GenerationParams {
    double temperature = 0.7;
    double top_p = 0.95;
    int max_response_tokens = 800;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;
    int history_window = 10;

    bool operator==(const GenerationParams&) const = default;
};

enum class Expects { free_text, numbered_list, labeled_summary, verbatim_choice };

std::string_view to_string(Expects e);

struct PromptTemplate {
    std::string id;
    std::string system;  // format instructions; may contain placeholders
    std::string body;    // the user prompt
    std::optional<GenerationParams> params_override;
    Expects expects = Expects::free_text;
};

class PromptRegistry {
public:
    /// Built-in prompts for every generator and booster.
    static PromptRegistry builtin();

    /// Adds or replaces a template. Throws Error(ValidationError) for an empty id or body.
    void add(PromptTemplate t);
    /// Replaces system/body of existing ids and registers new ones.
    void apply(const std::vector<PromptOverride>& overrides);

    const PromptTemplate* find(std::string_view id) const;
    /// Throws Error(TemplateUnknown).
    const PromptTemplate& get(std::string_view id) const;
    std::vector<std::string> ids() const;

private:
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

struct Message {
    std::string role;  // system | user | assistant
    std::string content;

    bool operator==(const Message&) const = default;
};

struct RenderedPrompt {
    std::string template_id;
    std::string system;
    std::string prompt;
    std::string hash;  // sha256 of the whitespace-normalized prompt
};

/// Renders a registered template. Throws Error(TemplateUnknown | MissingBinding).
RenderedPrompt render_prompt(const PromptRegistry& registry, std::string_view id,
                             const placeholder::Bindings& bindings);

/// Fixture key for a rendered prompt: sha256 hex over NFC + trimmed + collapsed whitespace.
std::string prompt_hash(std::string_view rendered);

struct ProviderRequest {
    std::string template_id;
    std::string prompt;
    std::string prompt_hash;
    std::vector<Message> messages;  // system, clipped history, user prompt
    GenerationParams params;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string id() const = 0;
    /// Throws Error(ProviderTimeout | ProviderHttpError | MissingFixture).
    virtual std::string complete(const ProviderRequest& request) = 0;
};

struct Fixture {
    std::string template_id;
    std::string prompt_hash;
    std::string prompt_excerpt;
    std::string response;
};

/// Deterministic provider answering from canned fixtures keyed by (template id, prompt hash).
class MockProvider : public Provider {
public:
    MockProvider(std::vector<Fixture> fixtures, bool strict);

    /// Throws Error(MissingFile) or Error(FixtureParseError).
    static std::unique_ptr<MockProvider> load(const std::filesystem::path& path, bool strict);
    static std::vector<Fixture> parse_fixtures(std::string_view yaml);

    std::string id() const override { return strict_ ? "mock:strict" : "mock:echo"; }
    std::string complete(const ProviderRequest& request) override;

    static std::string miss_marker(const ProviderRequest& request);

private:
    std::map<std::pair<std::string, std::string>, std::string> responses_;
    bool strict_;
};

struct HttpSettings {
    std::string endpoint;  // full chat-completions URL
    std::string model;
    std::string api_key;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;
    std::chrono::milliseconds backoff{250};  // doubled per retry
};

/// OpenAI-compatible chat-completions client.
class HttpProvider : public Provider {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit HttpProvider(HttpSettings settings, Sleeper sleep = {});

    std::string id() const override { return "http:" + settings_.model; }
    std::string complete(const ProviderRequest& request) override;

    /// Attempts made by the last complete() call.
    int last_attempts() const { return last_attempts_.load(); }

private:
    HttpSettings settings_;
    Sleeper sleep_;
    std::atomic<int> last_attempts_{0};
};

struct Exchange {
    std::string id;
    std::string template_id;
    std::string prompt;
    std::string prompt_hash;
    std::vector<Message> messages;
    GenerationParams params;
    std::string provider;
    std::optional<std::string> response;
    std::optional<std::string> error;
    long long latency_ms = 0;
    std::string timestamp;
};

std::string to_jsonl(const Exchange& e);
Exchange exchange_from_jsonl(std::string_view line);

/// Append-only exchange log. Keeps records in memory and, when a path is
/// given, appends one JSON line per exchange.
class AuditLog {
public:
    AuditLog() = default;
    explicit AuditLog(std::filesystem::path path);

    void append(const Exchange& e);
    std::vector<Exchange> records() const;
    std::size_t size() const;
    const std::optional<std::filesystem::path>& path() const { return path_; }

private:
    mutable std::mutex mutex_;
    std::optional<std::filesystem::path> path_;
    std::vector<Exchange> records_;
};

struct Completion {
    std::string text;
    std::string exchange_id;
};

/// Single entry point for LLM calls: renders, calls the provider, logs every attempt.
class Gateway {
public:
    Gateway(PromptRegistry registry, std::shared_ptr<Provider> provider, std::shared_ptr<AuditLog> log);

    /// Throws Error(TemplateUnknown | MissingBinding) and provider errors.
    /// The returned text has trailing whitespace removed, nothing else.
    Completion complete(std::string_view template_id, const placeholder::Bindings& bindings,
                        const std::vector<Message>& context = {},
                        const std::optional<GenerationParams>& params = std::nullopt);

    const PromptRegistry& registry() const { return registry_; }
    Provider& provider() { return *provider_; }
    AuditLog& log() { return *log_; }

private:
    PromptRegistry registry_;
    std::shared_ptr<Provider> provider_;
    std::shared_ptr<AuditLog> log_;
};

/// Builds the configured provider; a relative fixtures path resolves against the
/// project directory. The http kind reads its key from settings.credential_env.
std::shared_ptr<Provider> make_provider(const ProviderSettings& settings, const std::filesystem::path& project_dir);

/// Text after a leading `N.` or `N)` prefix; nullopt for any other line.
std::optional<std::string> numbered_item(std::string_view line);

/// Items of lines prefixed `N.` or `N)`; prefixes stripped, blank items dropped.
/// Throws Error(EmptyList) when no numbered line is found.
std::vector<std::string> parse_numbered_list(std::string_view text);

}  // namespace ca::llm
