#pragma once

#include "ca/boosters.hpp"
#include "ca/dialog.hpp"
#include "ca/engine.hpp"
#include "ca/nlu.hpp"

#include <json.hpp>

// JSON shapes shared by the HTTP API, the session event files and the CLI.
namespace ca::serialize {

using nlohmann::json;

json to_json(const nlu::IntentPrediction& p);
json to_json(const nlu::EntityMatch& m);
json to_json(const dialog::BoosterActivation& a);
json to_json(const dialog::ContextFrame& f);
json to_json(const dialog::TurnRecord& r);
json to_json(const engine::TurnResult& r);  // MessageResponse
json to_json(const boosters::HandoffSummary& s);

json to_json(const std::vector<nlu::EntityMatch>& v);
json to_json(const std::vector<dialog::ContextFrame>& v);
json to_json(const std::vector<dialog::TurnRecord>& v);

/// Full dialog state without the transcript, for snapshots.
json state_snapshot(const dialog::DialogState& s);

/// Inverse functions; throw Error(ParseError) on malformed input.
nlu::IntentPrediction prediction_from_json(const json& j);
nlu::EntityMatch entity_from_json(const json& j);
dialog::BoosterActivation activation_from_json(const json& j);
dialog::ContextFrame frame_from_json(const json& j);
dialog::TurnRecord turn_from_json(const json& j);
/// Restores a snapshot; the transcript is left empty.
dialog::DialogState state_from_snapshot(const json& j);

}  // namespace ca::serialize
