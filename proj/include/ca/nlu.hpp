#pragma once

#include "ca/project.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ca::nlu {

/// Sparse vector: (term index, weight) sorted by term index.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

struct ExampleVector {
    std::string intent;
    SparseVector vector;
    std::string text;
};

/// TF-IDF nearest-neighbour intent model. Immutable after training.
struct IntentModel {
    std::map<std::string, std::size_t> vocabulary;
    std::vector<double> idf;
    std::vector<ExampleVector> examples;
    std::vector<std::string> intents;  // sorted
    double tau_oos = 0.35;

    std::size_t example_count() const { return examples.size(); }
};

struct ScoredIntent {
    std::string intent;
    double score = 0.0;

    bool operator==(const ScoredIntent&) const = default;
};

struct IntentPrediction {
    std::optional<std::string> intent;
    double confidence = 0.0;
    std::vector<ScoredIntent> ranked;

    bool operator==(const IntentPrediction&) const = default;
};

struct EntityMatch {
    std::string entity;
    std::string raw;
    std::size_t start = 0;  // code points into the NFC utterance
    std::size_t end = 0;
    std::string value;
    EntityKind extractor = EntityKind::pattern;

    bool operator==(const EntityMatch&) const = default;
};

/// NFC, lowercase, split on non-alphanumeric runs.
std::vector<std::string> normalize(std::string_view text);

/// Builds the model from human/approved examples only.
/// Throws Error(UntrainableIntent) naming the first intent without usable examples.
IntentModel train(const ProjectConfig& config);

struct ClassifyOptions {
    std::size_t top_k = 5;            // 0 = every intent
    std::set<std::string> restrict_to;  // empty = all intents
};

/// Cosine nearest neighbour; score(intent) = max cosine over its examples.
/// Throws Error(EmptyUtterance) when normalize(text) is empty.
IntentPrediction classify(const IntentModel& model, std::string_view text, const ClassifyOptions& options = {});

/// Query vector (L2-normalized TF-IDF over the model vocabulary); empty when no term is known.
SparseVector vectorize(const IntentModel& model, const std::vector<std::string>& tokens);

double cosine(const SparseVector& a, const SparseVector& b);

struct ExtractOptions {
    /// Entity types preferred when two candidates cover the same span, e.g. the
    /// entity types of the active frame's pending slots.
    std::vector<std::string> preferred;
};

/// Pattern and gazetteer extraction; overlaps resolved leftmost-longest; sorted by start.
std::vector<EntityMatch> extract_entities(const ProjectConfig& config, std::string_view text,
                                          const ExtractOptions& options = {});

/// Case-insensitive gazetteer lookup. Throws Error(WrongEntityKind) for pattern
/// entities and Error(UnknownEntity) for unknown names.
std::optional<std::string> synonym_canonical(const ProjectConfig& config, std::string_view entity,
                                             std::string_view term);

/// Value normalization for the built-in pattern entities ("400 Dollars" -> "400 USD").
std::string normalize_value(Normalizer normalizer, std::string_view raw);

}  // namespace ca::nlu
