#pragma once

#include "ca/llm.hpp"
#include "ca/project.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

// Design-time generation into a staging area; nothing reaches the project
// without an explicit approve.
namespace ca::accelerator {

enum class ItemKind { intent, utterance, entity, synonym, persona_trait, template_localization };
enum class ItemStatus { pending, approved, rejected };

std::string_view to_string(ItemKind k);
std::string_view to_string(ItemStatus s);
ItemKind item_kind_from_string(std::string_view s);
ItemStatus item_status_from_string(std::string_view s);

/// target by kind: intent -> slug; utterance -> intent name; entity -> slug;
/// synonym -> "entity:canonical"; persona_trait -> "persona";
/// template_localization -> "template_key@locale" (content holds one text per line).
struct StagedItem {
    std::string id;
    ItemKind kind = ItemKind::utterance;
    std::string target;
    std::string content;
    std::string created_at;
    ItemStatus status = ItemStatus::pending;
    std::string exchange_id;

    bool operator==(const StagedItem&) const = default;
};

struct Staging {
    std::uint64_t next_id = 1;
    std::vector<StagedItem> items;

    bool operator==(const Staging&) const = default;

    std::vector<StagedItem> pending() const;
    StagedItem* find(std::string_view id);
};

/// Missing staging.yaml reads as empty. Throws Error(ParseError).
Staging load_staging(const std::filesystem::path& dir);
void save_staging(const Staging& staging, const std::filesystem::path& dir);

struct GenReport {
    std::vector<StagedItem> staged;
    std::vector<std::string> dropped;  // duplicates of existing or pending content
    std::vector<std::string> flagged;  // withheld, e.g. synonym collisions
    std::vector<std::string> warnings;
    std::string raw;  // provider response
};

struct ApproveOptions {
    std::string entity_pattern;  // approve entities as pattern kind with this regex
};

class Workspace {
public:
    /// Loads and validates the project and its staging file.
    Workspace(std::filesystem::path dir, llm::Gateway* gateway);
    Workspace(std::filesystem::path dir, ProjectConfig config, Staging staging, llm::Gateway* gateway);

    const std::filesystem::path& dir() const { return dir_; }
    const ProjectConfig& config() const { return config_; }
    const Staging& staging() const { return staging_; }

    GenReport gen_intents(std::string_view domain, int n);
    GenReport gen_utterances(std::string_view intent, int n, std::string_view constraints);
    GenReport gen_entities(std::string_view domain);
    GenReport gen_synonyms(std::string_view entity, std::string_view term);
    GenReport gen_persona(std::string_view role);
    GenReport localize(const std::vector<std::string>& template_keys, const std::vector<std::string>& locales);

    /// Merges the items into the project and persists project and staging.
    /// Throws Error(UnknownItem | AlreadyDecided) before changing anything.
    void approve(const std::vector<std::string>& ids, const ApproveOptions& options = {});
    void reject(const std::vector<std::string>& ids);

private:
    llm::Gateway& gateway();
    StagedItem& stage(GenReport& report, ItemKind kind, std::string target, std::string content,
                      const std::string& exchange_id);
    bool pending_exists(ItemKind kind, std::string_view target, std::string_view content) const;
    std::vector<StagedItem*> decide(const std::vector<std::string>& ids);
    void persist_staging();

    std::filesystem::path dir_;
    ProjectConfig config_;
    Staging staging_;
    llm::Gateway* gateway_;
};

/// Items of a numbered list, or of a comma-separated list when no line is numbered.
/// Trailing periods and ellipses are stripped. Throws Error(EmptyList).
std::vector<std::string> parse_term_list(std::string_view text);

/// Intent name from a generated list item: explanation, alternatives and articles dropped
/// ("Pay a bill or set up recurring payments" -> pay_bill).
std::string intent_name(std::string_view item);

/// Crude singular form of a snake_case name ("account_numbers" -> "account_number").
std::string singular(std::string_view slug);

/// Trait phrases from a free-text role description.
std::vector<std::string> extract_traits(std::string_view description);

/// Per-language item lists, in the order of `languages` (display names). Items are
/// numbered continuously across "Language:" blocks. Throws Error(FormatParseError).
std::vector<std::vector<std::string>> parse_localization(std::string_view text,
                                                         const std::vector<std::string>& languages);

/// "three" for 3, digits above twelve.
std::string count_word(std::size_t n);

/// "A, B and C".
std::string join_and(const std::vector<std::string>& items);

}  // namespace ca::accelerator
