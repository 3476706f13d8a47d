#include "ca/engine.hpp"
#include "ca/error.hpp"

#include "script.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace ca;
using ca::engine::Engine;

namespace {

const char* kMisspelled = "wunt to cancal this accunt";

Engine banking_engine(std::vector<llm::Fixture> extra = {}) {
    return Engine(ca_test::banking(), ca_test::banking_gateway(std::move(extra)));
}

std::vector<std::string> fallback_ladder() {
    return ca_test::banking().template_for("fallback")->variants[0].texts;
}

}  // namespace

TEST(Engine, ScriptReplies) {
    const auto e = banking_engine();
    auto s = e.start_session();
    std::vector<std::vector<std::string>> replies;
    for (const auto& line : ca_test::kScript) replies.push_back(e.handle(s, line).replies);
    EXPECT_EQ(replies[0], (std::vector<std::string>{"Please provide the recipient's bank account number."}));
    EXPECT_EQ(replies[1], (std::vector<std::string>{"Thank you for providing your new address. To complete the address "
                                                    "change, please also provide the city."}));
    EXPECT_EQ(replies[2],
              (std::vector<std::string>{"Great, thank you for providing the city and postal code for your address change.",
                                        "Now, let's get back to the money transfer request.",
                                        "Please provide the recipient's bank account number."}));
    EXPECT_EQ(replies[3], (std::vector<std::string>{"Thank you for providing the necessary information.",
                                                    ca_test::kConfirmRequest}));
    EXPECT_EQ(replies[4], (std::vector<std::string>{"Germany is a country located in Central Europe.",
                                                    ca_test::kConfirmRequest}));
    EXPECT_EQ(replies[5], (std::vector<std::string>{"Thank you for confirming. Your request has been submitted."}));
    EXPECT_EQ(s.confirmed.size(), 2u);
    EXPECT_EQ(s.transcript.size(), 6u + 1 + 1 + 3 + 2 + 2 + 1);
}

TEST(Engine, OutOfScopeTurnKeepsFallbackCountAtZero) {
    const auto e = banking_engine();
    auto s = e.start_session();
    for (int i = 0; i < 4; ++i) e.handle(s, ca_test::kScript[i]);
    const auto r = e.handle(s, "Where is Germany?");
    EXPECT_EQ(r.debug.fallback_count, 0);
    EXPECT_TRUE(r.debug.awaiting_confirmation);
    std::vector<dialog::BoosterKind> kinds;
    for (const auto& b : r.debug.boosters) kinds.push_back(b.kind);
    EXPECT_EQ(kinds, (std::vector<dialog::BoosterKind>{dialog::BoosterKind::autocorrect, dialog::BoosterKind::closed_qa,
                                                       dialog::BoosterKind::out_of_scope}));
}

TEST(Engine, ClosedQaAnswerPrecedesGeneralAnswer) {
    auto provider = std::make_shared<ca_test::ScriptedProvider>([](const llm::ProviderRequest& r) -> std::string {
        if (r.template_id == "closed_qa") return "If you want to close an account call 001 23 45 89 28";
        if (r.template_id == "out_of_scope") return "General answer";
        throw Error(ErrorKind::MissingFixture, "none");
    });
    const Engine e(ca_test::banking(), ca_test::gateway(provider));
    auto s = e.start_session();
    const auto r = e.handle(s, "qwxz blorp");
    EXPECT_EQ(r.replies, (std::vector<std::string>{"If you want to close an account call 001 23 45 89 28"}));
    EXPECT_EQ(r.debug.fallback_count, 0);
    for (const auto& req : provider->requests) EXPECT_NE(req.template_id, "out_of_scope");
}

TEST(Engine, AutocorrectLiftsConfidence) {
    const auto e = banking_engine();
    const auto raw = nlu::classify(e.model(), kMisspelled);
    EXPECT_LT(raw.confidence, e.config().thresholds.tau_intent);
    auto s = e.start_session();
    const auto r = e.handle(s, kMisspelled);
    EXPECT_EQ(r.debug.prediction.intent, std::optional<std::string>("cancel_account"));
    EXPECT_GT(r.debug.prediction.confidence, raw.confidence);
    EXPECT_EQ(r.replies, (std::vector<std::string>{"I implore you to reconsider cancelling your account."}));
    ASSERT_EQ(r.debug.boosters.size(), 1u);
    EXPECT_EQ(r.debug.boosters[0].guard_outcome, dialog::GuardOutcome::passed);
}

TEST(Engine, GarbageCorrectionKeepsOriginalPrediction) {
    const auto e = banking_engine({ca_test::fixture("autocorrect", {{"utterance", kMisspelled}}, "zzqx vvlorp")});
    const auto raw = nlu::classify(e.model(), kMisspelled);
    auto s = e.start_session();
    const auto r = e.handle(s, kMisspelled);
    EXPECT_EQ(r.debug.prediction, raw);
    ASSERT_FALSE(r.debug.boosters.empty());
    EXPECT_EQ(r.debug.boosters[0].kind, dialog::BoosterKind::autocorrect);
    EXPECT_EQ(r.debug.boosters[0].guard_outcome, dialog::GuardOutcome::rejected);
}

TEST(Engine, ExpectedSlotAnswerSkipsAutocorrect) {
    const auto e = banking_engine();
    auto s = e.start_session();
    e.handle(s, ca_test::kScript[0]);
    const auto r = e.handle(s, "831123");
    EXPECT_TRUE(r.debug.boosters.empty());
    EXPECT_EQ(r.replies, (std::vector<std::string>{"Please provide the amount you would like to transfer."}));
}

TEST(Engine, DisambiguationQuestionThenChoice) {
    const auto e = banking_engine();
    auto s = e.start_session();
    const auto r = e.handle(s, "my bank account");
    EXPECT_EQ(r.replies,
              (std::vector<std::string>{"Do you want to transfer money from your account, or cancel account services altogether?"}));
    ASSERT_TRUE(s.disambiguation);
    const auto choice = e.handle(s, "2");
    EXPECT_EQ(choice.debug.prediction.intent, std::optional<std::string>("cancel_account"));
    EXPECT_EQ(choice.replies, (std::vector<std::string>{"I implore you to reconsider cancelling your account."}));
    EXPECT_FALSE(s.disambiguation);
}

TEST(Engine, ResolveChoiceByNameOrdinalOrNothing) {
    const auto e = banking_engine();
    const dialog::PendingDisambiguation p{{"transfer_money", "cancel_account"}, "my bank account", {}};
    EXPECT_EQ(e.resolve_choice(p, "the first one"), std::optional<std::string>("transfer_money"));
    EXPECT_EQ(e.resolve_choice(p, "cancel account please"), std::optional<std::string>("cancel_account"));
    EXPECT_EQ(e.resolve_choice(p, "1 or 2"), std::nullopt);
    EXPECT_EQ(e.resolve_choice(p, "hmm"), std::nullopt);
}

TEST(Engine, ApologyLadderWithoutBoosters) {
    const Engine e(ca_test::banking(), nullptr);
    const auto ladder = fallback_ladder();
    auto s = e.start_session();
    for (std::size_t i = 0; i < 12; ++i) {
        const auto r = e.handle(s, "qwxz " + std::to_string(i));
        ASSERT_FALSE(r.replies.empty());
        EXPECT_EQ(r.replies[0], ladder[std::min<std::size_t>(i, 9)]);
        EXPECT_EQ(r.debug.fallback_count, static_cast<int>(i + 1));
    }
    EXPECT_TRUE(s.handoff_suggested);
}

TEST(Engine, HandoffNoticeAfterRepeatedBreakdown) {
    const Engine e(ca_test::banking(), nullptr);
    auto s = e.start_session();
    e.handle(s, "qwxz");
    e.handle(s, "qwxz");
    const auto r = e.handle(s, "qwxz");
    EXPECT_EQ(r.replies.back(), "I shall now direct you to an agent who can further assist you.");
}

TEST(Engine, PersonaDirectiveRephrasesResponse) {
    auto config = ca_test::banking();
    config.intent("pay_bill")->response_template = "product_unavailable";
    const Engine e(config, ca_test::banking_gateway());
    auto s = e.start_session("", "simple_english");
    const auto r = e.handle(s, "I need to pay a bill.");
    EXPECT_EQ(r.replies, (std::vector<std::string>{"I'm sorry, but the product you are looking for is no longer available."}));
    ASSERT_EQ(r.debug.boosters.size(), 1u);
    EXPECT_EQ(r.debug.boosters[0].kind, dialog::BoosterKind::rephrase);
}

TEST(Engine, PersonaVariantNeedsNoRephrase) {
    auto config = ca_test::banking();
    config.intent("pay_bill")->response_template = "product_unavailable";
    const Engine e(config, ca_test::banking_gateway());
    auto s = e.start_session("", "british_upper_class");
    const auto r = e.handle(s, "I need to pay a bill.");
    EXPECT_TRUE(r.debug.boosters.empty());
    EXPECT_EQ(r.replies[0].rfind("I regret to inform you that the product you've inquired about", 0), 0u);
}

TEST(Engine, LocaleSelectsVariant) {
    auto config = ca_test::banking();
    config.template_for("pay_bill")->variants.push_back({"de", "", {"Rechnungen zahlen Sie im Bereich Zahlungen."}});
    const Engine e(config, ca_test::banking_gateway());
    auto s = e.start_session("de");
    EXPECT_EQ(e.handle(s, "I need to pay a bill.").replies[0], "Rechnungen zahlen Sie im Bereich Zahlungen.");
}

TEST(Engine, BlankTextIsRejected) {
    const auto e = banking_engine();
    auto s = e.start_session();
    try {
        e.handle(s, "   ");
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::EmptyUtterance);
    }
    EXPECT_TRUE(s.transcript.empty());
}

TEST(Engine, ProviderOutageDegradesToPipeline) {
    const Engine e(ca_test::banking(), ca_test::mock_gateway({}));
    auto s = e.start_session();
    const auto r = e.handle(s, "Where is Germany?");
    EXPECT_EQ(r.replies[0], fallback_ladder()[0]);
    for (const auto& b : r.debug.boosters) EXPECT_FALSE(b.error.empty());
}

TEST(Engine, HandoffSummarizesAndLocksSession) {
    auto provider = std::make_shared<ca_test::ScriptedProvider>([](const llm::ProviderRequest& r) -> std::string {
        if (r.template_id == "summarize") return "Agent Action Required: Finish the transfer.\nSummary: Transfer pending.";
        throw Error(ErrorKind::MissingFixture, "none");
    });
    const Engine e(ca_test::banking(), ca_test::gateway(provider));
    auto s = e.start_session();
    e.handle(s, ca_test::kScript[0]);
    dialog::BoosterActivation act;
    const auto summary = e.handoff(s, &act);
    EXPECT_EQ(summary.action_required, "Finish the transfer.");
    EXPECT_TRUE(s.handed_off);
    EXPECT_NE(provider->requests.back().prompt.find("User: " + ca_test::kScript[0]), std::string::npos);
    EXPECT_THROW(e.handle(s, "hello"), Error);
    EXPECT_THROW(e.handoff(s), Error);
}

TEST(Engine, UntrainableConfigIsRejected) {
    auto config = ca_test::banking();
    for (auto& x : config.intent("pay_bill")->examples) x.provenance = Provenance::rejected;
    try {
        Engine e(config, nullptr);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::UntrainableIntent);
    }
}
