// ca: authoring, training, chat and serving for a conversational agent project.

#include "ca/accelerator.hpp"
#include "ca/engine.hpp"
#include "ca/error.hpp"
#include "ca/llm.hpp"
#include "ca/nlu.hpp"
#include "ca/project.hpp"
#include "ca/serialize.hpp"
#include "ca/service.hpp"
#include "ca/text.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ca;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_user = 1;
constexpr int exit_provider = 2;

struct Globals {
    std::string project = ".";
    std::string provider;
    std::string fixtures;
};

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

/// Provider settings with flags over environment over project file.
ProjectConfig with_overrides(ProjectConfig config, const Globals& g) {
    const std::string kind = !g.provider.empty() ? g.provider : env_or("CA_PROVIDER", "");
    if (!kind.empty()) config.provider.kind = kind;
    const std::string fixtures = !g.fixtures.empty() ? g.fixtures : env_or("CA_FIXTURES", "");
    if (!fixtures.empty()) config.provider.fixtures = fs::absolute(fixtures).string();
    return config;
}

std::shared_ptr<llm::Gateway> gateway_for(const ProjectConfig& config, const Globals& g,
                                          std::shared_ptr<llm::AuditLog> log) {
    return engine::make_gateway(with_overrides(config, g), g.project, std::move(log));
}

std::shared_ptr<llm::AuditLog> project_audit_log(const Globals& g) {
    const fs::path dir = fs::path(g.project) / "audit";
    fs::create_directories(dir);
    return std::make_shared<llm::AuditLog>(dir / "exchanges.jsonl");
}

int report_error(const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& d : e.details()) std::cerr << "  " << d << "\n";
    const bool bad_response = e.kind() == ErrorKind::EmptyList || e.kind() == ErrorKind::FormatParseError;
    return e.is_provider_error() || bad_response ? exit_provider : exit_user;
}

void print_report(const accelerator::GenReport& r) {
    for (const auto& i : r.staged)
        std::cout << "staged " << i.id << "  " << accelerator::to_string(i.kind) << "  " << i.target << "  "
                  << text::squash_whitespace(i.content) << "\n";
    for (const auto& d : r.dropped) std::cout << "dropped (duplicate)  " << d << "\n";
    for (const auto& f : r.flagged) std::cout << "flagged  " << f << "\n";
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << r.staged.size() << " item(s) staged\n";
}

ProjectConfig skeleton(const std::string& name) {
    ProjectConfig c;
    c.name = name;
    c.domain = "customer service";
    c.locales = {"en"};
    c.intents.push_back({"greet", "customers saying hello", "greet",
                         {{"hello", "en", Provenance::human},
                          {"hi there", "en", Provenance::human},
                          {"good morning", "en", Provenance::human}}});
    c.intents.push_back({"goodbye", "customers ending the conversation", "goodbye",
                         {{"bye", "en", Provenance::human},
                          {"goodbye, thanks", "en", Provenance::human},
                          {"see you later", "en", Provenance::human}}});
    c.entities.push_back({"confirmation", EntityKind::gazetteer, "", false, Normalizer::none,
                          {{"yes", {"yeah", "correct", "sure"}}, {"no", {"nope", "wrong"}}}});
    c.dialog.confirm_entity = "confirmation";
    auto add = [&](std::string key, std::vector<std::string> texts) {
        c.templates.push_back({std::move(key), {{"en", "", std::move(texts)}}, ""});
    };
    add("greet", {"Hello! How can I help you today?"});
    add("goodbye", {"Goodbye, have a nice day."});
    add("fallback", {"Sorry, I didn't understand that. Could you rephrase?",
                     "I'm sorry, I still didn't get that. Could you say it differently?"});
    add("confirm_request", {"Just to confirm: {details}. Is that correct?"});
    add("confirm_accepted", {"Done."});
    add("confirm_rejected", {"No problem, let's correct it."});
    add("stack_full", {"Let's finish the current request first."});
    add("handoff_notice", {"I'll connect you with a colleague."});
    add("frame_aborted", {"Okay, I've cancelled that."});
    add("disambiguation_fallback", {"Did you mean {option_a} or {option_b}?"});
    c.persona.role_description = "customer service agent";
    c.closed_qa.answers = {"Our service desk is open Monday to Friday, 9am to 5pm."};
    c.closed_qa.default_answer = "Please contact our service desk.";
    c.provider.fixtures = "fixtures.yaml";
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversational agent toolkit"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--project", g.project, "Project directory")->capture_default_str();
    app.add_option("--provider", g.provider, "LLM provider (mock|http)")->check(CLI::IsMember({"mock", "http"}));
    app.add_option("--fixtures", g.fixtures, "Fixture file for the mock provider");

    // init
    auto* init = app.add_subcommand("init", "Create a minimal project");
    std::string init_name = "assistant";
    init->add_option("--name", init_name, "Project name");

    auto* validate_cmd = app.add_subcommand("validate", "Check the project and list every violation");
    auto* train_cmd = app.add_subcommand("train", "Train the intent model and print example counts");

    auto* chat = app.add_subcommand("chat", "Interactive session against the engine");
    std::string chat_locale;
    std::string chat_persona;
    bool chat_debug = false;
    chat->add_option("--locale", chat_locale);
    chat->add_option("--persona", chat_persona);
    chat->add_flag("--debug", chat_debug, "Print the debug block after every turn");

    auto* serve = app.add_subcommand("serve", "Run the HTTP chat service");
    int port = 8710;
    std::string host = "127.0.0.1";
    std::string data_dir;
    std::string cors = "*";
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--data-dir", data_dir, "Session and audit storage (default: <project>/data)");
    serve->add_option("--cors-origin", cors)->capture_default_str();

    // gen
    auto* gen = app.add_subcommand("gen", "Generate design-time content into staging");
    gen->require_subcommand(1);
    std::string domain;
    std::string intent;
    std::string constraints;
    std::string entity;
    std::string term;
    std::string role;
    int count = 10;
    std::vector<std::string> template_keys;
    std::vector<std::string> locales;
    auto* gen_intents = gen->add_subcommand("intents", "Suggest intents for a domain");
    gen_intents->add_option("--domain", domain)->required();
    gen_intents->add_option("-n,--count", count)->capture_default_str();
    auto* gen_utts = gen->add_subcommand("utterances", "Generate training utterances for an intent");
    gen_utts->add_option("--intent", intent)->required();
    gen_utts->add_option("-n,--count", count)->capture_default_str();
    gen_utts->add_option("--constraints", constraints);
    auto* gen_ents = gen->add_subcommand("entities", "Suggest entity types for a domain");
    gen_ents->add_option("--domain", domain)->required();
    auto* gen_syn = gen->add_subcommand("synonyms", "Generate synonyms for a gazetteer value");
    gen_syn->add_option("--entity", entity)->required();
    gen_syn->add_option("--term", term)->required();
    auto* gen_persona = gen->add_subcommand("persona", "Extract persona traits from a role description");
    gen_persona->add_option("--role", role)->required();
    auto* gen_loc = gen->add_subcommand("localize", "Translate templates into declared locales");
    gen_loc->add_option("--template", template_keys)->required();
    gen_loc->add_option("--locale", locales)->required();

    // review
    auto* review = app.add_subcommand("review", "Approve or reject staged items");
    review->require_subcommand(1);
    std::vector<std::string> ids;
    std::string entity_pattern;
    auto* review_list = review->add_subcommand("list", "List pending items");
    auto* review_approve = review->add_subcommand("approve", "Merge items into the project");
    review_approve->add_option("ids", ids)->required();
    review_approve->add_option("--pattern", entity_pattern, "Approve entities as pattern kind with this regex");
    auto* review_reject = review->add_subcommand("reject", "Mark items rejected");
    review_reject->add_option("ids", ids)->required();

    // prompt
    auto* prompt = app.add_subcommand("prompt", "Render a prompt template and print its fixture hash");
    std::string prompt_id;
    std::vector<std::string> binds;
    std::vector<std::string> bind_files;
    prompt->add_option("id", prompt_id)->required();
    prompt->add_option("--bind", binds, "name=value");
    prompt->add_option("--bind-file", bind_files, "name=path, value read from the file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*init) {
            const fs::path dir = g.project;
            if (fs::exists(dir / "manifest.yaml")) {
                std::cerr << "error: " << (dir / "manifest.yaml").string() << " already exists\n";
                return exit_user;
            }
            fs::create_directories(dir);
            save_project(skeleton(init_name), dir);
            write_file_atomic(dir / "fixtures.yaml", "[]\n");
            accelerator::save_staging({}, dir);
            std::cout << "initialized project " << init_name << " in " << dir.string() << "\n";
            return exit_ok;
        }

        if (*validate_cmd) {
            ProjectConfig config;
            try {
                config = load_project(g.project);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::ValidationError) throw;
                for (const auto& d : e.details()) std::cout << d << "\n";
                std::cout << e.details().size() << " error(s)\n";
                return exit_user;
            }
            int warnings = 0;
            for (const auto& v : validate(config)) {
                std::cout << v.to_string() << "\n";
                ++warnings;
            }
            std::cout << "ok: " << config.name << " (" << warnings << " warning(s))\n";
            return exit_ok;
        }

        if (*train_cmd) {
            const ProjectConfig config = load_project(g.project);
            const auto model = nlu::train(config);
            std::size_t skipped = 0;
            for (const auto& intent : config.intents) {
                std::size_t used = 0;
                for (const auto& ex : intent.examples)
                    usable_for_training(ex.provenance) ? ++used : ++skipped;
                std::cout << intent.name << "  " << used << "\n";
            }
            std::cout << "trained on " << model.example_count() << " example(s), " << model.vocabulary.size()
                      << " term(s); " << skipped << " unapproved example(s) excluded\n";
            return exit_ok;
        }

        if (*chat) {
            const ProjectConfig config = load_project(g.project);
            const engine::Engine engine(config, gateway_for(config, g, project_audit_log(g)));
            auto state = engine.start_session(chat_locale, chat_persona);
            std::cout << "session " << state.session_id << " (/handoff, /quit)\n";
            std::string line;
            while (std::cout << "you> " << std::flush, std::getline(std::cin, line)) {
                const std::string input = text::trim(line);
                if (input.empty()) continue;
                if (input == "/quit") break;
                try {
                    if (input == "/handoff") {
                        const auto s = engine.handoff(state);
                        std::cout << "Agent Action Required: " << s.action_required << "\nSummary: " << s.summary
                                  << "\n";
                        break;
                    }
                    const auto result = engine.handle(state, input);
                    for (const auto& r : result.replies) std::cout << "bot> " << r << "\n";
                    if (chat_debug) std::cout << serialize::to_json(result)["debug"].dump(2) << "\n";
                } catch (const Error& e) {
                    report_error(e);
                }
            }
            return exit_ok;
        }

        if (*serve) {
            ProjectConfig config;
            try {
                config = load_project(g.project);
            } catch (const Error& e) {
                std::cerr << "refusing to start: project is invalid\n";
                return report_error(e);
            }
            const fs::path data = !data_dir.empty() ? fs::path(data_dir)
                                                    : fs::path(env_or("CA_DATA_DIR", (fs::path(g.project) / "data").string()));
            fs::create_directories(data);
            auto log = std::make_shared<llm::AuditLog>(data / "exchanges.jsonl");
            auto engine = std::make_shared<const engine::Engine>(config, gateway_for(config, g, log));
            service::Service svc(engine, {data, cors});
            httplib::Server server;
            svc.mount(server);

            static httplib::Server* running = nullptr;
            running = &server;
            auto stop = [](int) {
                if (running) running->stop();
            };
            std::signal(SIGINT, stop);
            std::signal(SIGTERM, stop);

            if (!server.bind_to_port(host, port)) {
                std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
                return exit_user;
            }
            std::cout << "listening on http://" << host << ":" << port << std::endl;
            server.listen_after_bind();
            return exit_ok;
        }

        if (*gen) {
            const ProjectConfig config = load_project(g.project);
            auto gateway = gateway_for(config, g, project_audit_log(g));
            accelerator::Workspace ws(g.project, config, accelerator::load_staging(g.project), gateway.get());
            accelerator::GenReport report;
            if (*gen_intents)
                report = ws.gen_intents(domain, count);
            else if (*gen_utts)
                report = ws.gen_utterances(intent, count, constraints);
            else if (*gen_ents)
                report = ws.gen_entities(domain);
            else if (*gen_syn)
                report = ws.gen_synonyms(entity, term);
            else if (*gen_persona)
                report = ws.gen_persona(role);
            else if (*gen_loc)
                report = ws.localize(template_keys, locales);
            print_report(report);
            return exit_ok;
        }

        if (*review) {
            accelerator::Workspace ws(g.project, nullptr);
            if (*review_list) {
                const auto pending = ws.staging().pending();
                std::cout << "id\tkind\ttarget\tcontent\n";
                for (const auto& i : pending)
                    std::cout << i.id << "\t" << accelerator::to_string(i.kind) << "\t" << i.target << "\t"
                              << text::squash_whitespace(i.content) << "\n";
                return exit_ok;
            }
            if (*review_approve) {
                ws.approve(ids, {entity_pattern});
                std::cout << "approved " << ids.size() << " item(s)\n";
            } else {
                ws.reject(ids);
                std::cout << "rejected " << ids.size() << " item(s)\n";
            }
            return exit_ok;
        }

        if (*prompt) {
            auto registry = llm::PromptRegistry::builtin();
            if (fs::exists(fs::path(g.project) / "manifest.yaml")) registry.apply(load_project(g.project).prompts);
            placeholder::Bindings bindings;
            for (const auto& b : binds) {
                const auto eq = b.find('=');
                if (eq == std::string::npos) throw Error(ErrorKind::Precondition, "--bind expects name=value");
                bindings[b.substr(0, eq)] = b.substr(eq + 1);
            }
            for (const auto& b : bind_files) {
                const auto eq = b.find('=');
                if (eq == std::string::npos) throw Error(ErrorKind::Precondition, "--bind-file expects name=path");
                std::ifstream in(b.substr(eq + 1));
                if (!in) throw Error(ErrorKind::MissingFile, b.substr(eq + 1));
                std::stringstream ss;
                ss << in.rdbuf();
                std::string value = ss.str();
                while (!value.empty() && value.back() == '\n') value.pop_back();
                bindings[b.substr(0, eq)] = value;
            }
            const auto rendered = llm::render_prompt(registry, prompt_id, bindings);
            std::cout << "template_id: " << rendered.template_id << "\nprompt_hash: " << rendered.hash << "\n---\n"
                      << rendered.prompt << "\n";
            return exit_ok;
        }
    } catch (const Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_user;
    }
    return exit_ok;
}
