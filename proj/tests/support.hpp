#pragma once

#include "ca/llm.hpp"
#include "ca/project.hpp"

#include <cstdlib>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ca_test {

namespace fs = std::filesystem;

inline fs::path banking_dir() { return fs::path(CA_SOURCE_DIR) / "data" / "banking"; }

inline ca::ProjectConfig banking() {
    static const ca::ProjectConfig config = ca::load_project(banking_dir());
    return config;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "ca-test-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

    /// Copies the banking project into a subdirectory and returns its path.
    fs::path copy_banking(const std::string& name = "project") const {
        const fs::path dest = path_ / name;
        fs::copy(banking_dir(), dest, fs::copy_options::recursive);
        return dest;
    }

private:
    fs::path path_;
};

/// Fixture keyed on the prompt the registry renders for these bindings.
inline ca::llm::Fixture fixture(const std::string& id, const ca::placeholder::Bindings& bindings, std::string response) {
    const auto registry = ca::llm::PromptRegistry::builtin();
    const auto rendered = ca::llm::render_prompt(registry, id, bindings);
    return {id, rendered.hash, rendered.prompt.substr(0, 40), std::move(response)};
}

inline std::vector<ca::llm::Fixture> bundled_fixtures() {
    std::ifstream in(banking_dir() / "fixtures.yaml");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ca::llm::MockProvider::parse_fixtures(text);
}

/// Provider answering through a callback; records every request.
class ScriptedProvider : public ca::llm::Provider {
public:
    using Fn = std::function<std::string(const ca::llm::ProviderRequest&)>;
    explicit ScriptedProvider(Fn fn) : fn_(std::move(fn)) {}

    std::string id() const override { return "scripted"; }
    std::string complete(const ca::llm::ProviderRequest& request) override {
        requests.push_back(request);
        return fn_(request);
    }

    std::vector<ca::llm::ProviderRequest> requests;

private:
    Fn fn_;
};

inline std::shared_ptr<ca::llm::Gateway> gateway(std::shared_ptr<ca::llm::Provider> provider,
                                                 std::shared_ptr<ca::llm::AuditLog> log = nullptr) {
    if (!log) log = std::make_shared<ca::llm::AuditLog>();
    return std::make_shared<ca::llm::Gateway>(ca::llm::PromptRegistry::builtin(), std::move(provider), std::move(log));
}

inline std::shared_ptr<ca::llm::Gateway> mock_gateway(std::vector<ca::llm::Fixture> fixtures, bool strict = true) {
    return gateway(std::make_shared<ca::llm::MockProvider>(std::move(fixtures), strict));
}

/// Gateway over the bundled banking fixtures, optionally with extra fixtures.
inline std::shared_ptr<ca::llm::Gateway> banking_gateway(std::vector<ca::llm::Fixture> extra = {}) {
    auto fixtures = bundled_fixtures();
    fixtures.insert(fixtures.end(), extra.begin(), extra.end());
    return mock_gateway(std::move(fixtures));
}

}  // namespace ca_test
