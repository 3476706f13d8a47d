#include "ca/boosters.hpp"
#include "ca/error.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace ca;
using namespace ca::boosters;
using dialog::GuardOutcome;
using dialog::Speaker;
using dialog::TurnRecord;

namespace {

const std::vector<std::pair<std::string, std::string>> kClosedQa = {
    {"I have a new address",
     "To change your address you need to sent a mail to info.company.com including your new and old complete address."},
    {"How can I get an account with your company?",
     "If you want to open a bank account, provide a copy of your password and a list of current bank accounts."},
    {"I want to quit", "If you want to close an account call 001 23 45 89 28"},
    {"I forgot my pwd", "To change your password sent a mail to info.company.com with that request."},
    {"What are the interest rates I need to pay for a mortgage?", "Please call 001 23 45 89 01"},
};

std::vector<TurnRecord> handoff_transcript() {
    const std::vector<std::pair<Speaker, std::string>> lines = {
        {Speaker::bot, "Hi, how can I help?"},
        {Speaker::user, "I need to get a new debit card"},
        {Speaker::bot, "I can help you order a new debit card. Is this a new card or a replacement?"},
        {Speaker::user, "Replacement"},
        {Speaker::bot, "Is your current card lost, damaged or stolen?"},
        {Speaker::user, "Damaged"},
        {Speaker::bot, "Please go to www.cardreplace.com to request your new card. Did I help you today?"},
        {Speaker::user,
         "The trouble is the address you have for me is out of date, so before you post it you need to update my address"},
        {Speaker::bot, "I’m worry I didn’t understand that. Did I help you today?"},
        {Speaker::user, "I need to update my address"},
        {Speaker::bot,
         "My colleague can help you this query, I’m connecting you now. Feel free to add any information that might be help now."},
        {Speaker::user, "My new address is 1 Main Street, Capital City, Countryland, AA1 XZY."},
    };
    std::vector<TurnRecord> out;
    for (const auto& [s, t] : lines) out.push_back({s, t, std::nullopt});
    return out;
}

std::string random_string(std::mt19937& rng) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz ABCXYZ0123456789.,;!?'\"\n\t-ü";
    std::string s;
    const int len = std::uniform_int_distribution<int>(0, 120)(rng);
    for (int i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
}

std::string near_miss(std::mt19937& rng, std::string s) {
    switch (rng() % 7) {
        case 0: return s + ".";
        case 1: return s.empty() ? s : s.substr(0, s.size() - 1);
        case 2: return "  " + s + "\n";
        case 3: {
            for (char& c : s)
                if (c == ',') c = ';';
            return s;
        }
        case 4: return "\"" + s + "\"";
        case 5: {
            if (!s.empty()) s[rng() % s.size()] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])) ^ 1);
            return s;
        }
        default: return "Answer: " + s;
    }
}

}  // namespace

TEST(ClosedQa, ReplaysFiveQuestions) {
    const auto c = ca_test::banking();
    auto gw = ca_test::banking_gateway();
    for (const auto& [question, answer] : kClosedQa) {
        const auto out = closed_qa(*gw, c.closed_qa, question);
        EXPECT_TRUE(out.ok);
        EXPECT_EQ(out.text, answer) << question;
        EXPECT_EQ(out.activation.kind, dialog::BoosterKind::closed_qa);
        EXPECT_FALSE(out.activation.exchange_id.empty());
    }
}

TEST(ClosedQa, LineBreakInsideAnswerPassesGuard) {
    GuardOutcome g;
    const auto c = ca_test::banking();
    EXPECT_EQ(guard_closed_answer(c.closed_qa, "If you want to open a bank account, \nprovide a copy of your password "
                                               "and a list of current bank accounts.",
                                  &g),
              c.closed_qa.answers[1]);
    EXPECT_EQ(g, GuardOutcome::passed);
}

TEST(ClosedQa, TrailingPeriodOnDefaultIsSubstituted) {
    GuardOutcome g;
    const auto c = ca_test::banking();
    EXPECT_EQ(guard_closed_answer(c.closed_qa, "Please call 001 23 45 89 01.", &g), c.closed_qa.default_answer);
    EXPECT_EQ(g, GuardOutcome::substituted_default);
}

TEST(ClosedQa, GuardIsTotalOverFuzzedOutputs) {
    const auto policy = ca_test::banking().closed_qa;
    std::set<std::string> allowed(policy.answers.begin(), policy.answers.end());
    allowed.insert(policy.default_answer);
    std::mt19937 rng(1234);
    for (int i = 0; i < 1000; ++i) {
        std::string output;
        if (i % 2 == 0) {
            output = random_string(rng);
        } else {
            const auto& base = i % 5 == 1 ? policy.default_answer : policy.answers[rng() % policy.answers.size()];
            output = near_miss(rng, base);
        }
        GuardOutcome g;
        const auto got = guard_closed_answer(policy, output, &g);
        ASSERT_TRUE(allowed.count(got)) << output;
        if (got != policy.default_answer) {
            EXPECT_EQ(normalize_answer(output), normalize_answer(got));
        }
    }
}

TEST(ClosedQa, ProviderFailureYieldsDefault) {
    auto gw = ca_test::gateway(std::make_shared<ca_test::ScriptedProvider>(
        [](const llm::ProviderRequest&) -> std::string { throw Error(ErrorKind::ProviderTimeout, "slow"); }));
    const auto c = ca_test::banking();
    const auto out = closed_qa(*gw, c.closed_qa, "anything");
    EXPECT_FALSE(out.ok);
    EXPECT_EQ(out.text, c.closed_qa.default_answer);
    EXPECT_FALSE(out.activation.error.empty());
}

TEST(ClosedQa, AmbiguousDuplicateAnswersFallBackToDefault) {
    ClosedQAPolicy p;
    p.answers = {"Same", "Same"};
    p.default_answer = "Call us";
    EXPECT_EQ(guard_closed_answer(p, "Same"), "Call us");
}

TEST(Autocorrect, CorrectsMisspelledUtterance) {
    auto gw = ca_test::banking_gateway();
    const auto out = autocorrect(*gw, "wunt to cancal this accunt");
    EXPECT_TRUE(out.ok);
    EXPECT_EQ(out.text, "I want to cancel this account");
}

TEST(Autocorrect, ProviderErrorKeepsInput) {
    auto gw = ca_test::mock_gateway({});
    const auto out = autocorrect(*gw, "helo");
    EXPECT_FALSE(out.ok);
    EXPECT_EQ(out.text, "helo");
    EXPECT_EQ(out.activation.guard_outcome, GuardOutcome::rejected);
    EXPECT_NE(out.activation.error.find("MissingFixture"), std::string::npos);
}

TEST(Autocorrect, BlankCorrectionIsRejected) {
    auto gw = ca_test::gateway(std::make_shared<ca_test::ScriptedProvider>([](const llm::ProviderRequest&) { return "  "; }));
    const auto out = autocorrect(*gw, "helo");
    EXPECT_FALSE(out.ok);
    EXPECT_EQ(out.text, "helo");
}

TEST(OutOfScope, AnswersGeneralKnowledge) {
    auto gw = ca_test::banking_gateway();
    const auto out = answer_out_of_scope(*gw, ca_test::banking(), "Where is Germany?");
    EXPECT_TRUE(out.outcome.ok);
    EXPECT_FALSE(out.refused);
    EXPECT_EQ(out.outcome.text, "Germany is a country located in Central Europe.");
}

TEST(OutOfScope, RefusalMapsToDefaultAnswer) {
    auto gw = ca_test::gateway(std::make_shared<ca_test::ScriptedProvider>([](const llm::ProviderRequest&) { return "REFUSED"; }));
    const auto c = ca_test::banking();
    const auto out = answer_out_of_scope(*gw, c, "Tell me a secret");
    EXPECT_TRUE(out.refused);
    EXPECT_EQ(out.outcome.text, c.closed_qa.default_answer);
}

TEST(Disambiguate, QuestionNamesBothOptions) {
    auto gw = ca_test::banking_gateway();
    const auto out = disambiguate(*gw, ca_test::banking(), "transfer_money", "cancel_account", "my bank account");
    EXPECT_TRUE(out.ok);
    EXPECT_EQ(out.text, "Do you want to transfer money from your account, or cancel account services altogether?");
}

TEST(Disambiguate, FallsBackToTemplate) {
    auto gw = ca_test::gateway(std::make_shared<ca_test::ScriptedProvider>([](const llm::ProviderRequest&) { return "Which one?"; }));
    const auto out = disambiguate(*gw, ca_test::banking(), "transfer_money", "cancel_account", "my bank account");
    EXPECT_EQ(out.text, "Did you mean transfer money or cancel account?");
    EXPECT_EQ(out.activation.guard_outcome, GuardOutcome::rejected);
}

TEST(Rephrase, SimpleEnglishFixture) {
    auto gw = ca_test::banking_gateway();
    const auto out = rephrase(*gw, "I regret to inform you that the product is no longer available.",
                              "in grammatically correct yet simple English", {});
    EXPECT_TRUE(out.ok);
    EXPECT_EQ(out.text, "I'm sorry, but the product you are looking for is no longer available.");
}

TEST(Rephrase, DroppedValueKeepsOriginal) {
    auto gw = ca_test::gateway(std::make_shared<ca_test::ScriptedProvider>(
        [](const llm::ProviderRequest&) { return "Your transfer to the other account is on its way."; }));
    const std::string original = "money transfer of 400 USD from account 334402 to account 831123";
    const auto out = rephrase(*gw, original, "more apologetic", {"400 USD", "334402", "831123"});
    EXPECT_FALSE(out.ok);
    EXPECT_EQ(out.text, original);
    EXPECT_EQ(out.activation.guard_outcome, GuardOutcome::rejected);
}

TEST(Rephrase, KeptValuesAreAccepted) {
    auto gw = ca_test::gateway(std::make_shared<ca_test::ScriptedProvider>([](const llm::ProviderRequest&) {
        return "My most profound apologies: 400 USD will go from 334402 to 831123.";
    }));
    const auto out = rephrase(*gw, "money transfer of 400 USD from account 334402 to account 831123",
                              "more apologetic", {"400 USD", "334402", "831123"});
    EXPECT_TRUE(out.ok);
}

TEST(Summary, ParsesLabels) {
    const auto s = parse_summary("Agent Action Required: Call back.\nSummary: Wants a call.");
    ASSERT_TRUE(s);
    EXPECT_EQ(s->action_required, "Call back.");
    EXPECT_EQ(s->summary, "Wants a call.");
    EXPECT_FALSE(parse_summary("Summary: only one label"));
    EXPECT_FALSE(parse_summary("Agent Action Required:\nSummary: x"));
}

TEST(Summary, DebitCardTranscriptFixture) {
    auto gw = ca_test::banking_gateway();
    BoosterActivation act;
    const auto s = summarize(*gw, handoff_transcript(), &act);
    EXPECT_NE(s.action_required.find("Update the user's address"), std::string::npos);
    EXPECT_NE(s.summary.find("1 Main Street, Capital City, Countryland, AA1 XZY"), std::string::npos);
    EXPECT_EQ(act.kind, dialog::BoosterKind::summarize);
    EXPECT_EQ(gw->log().size(), 1u);
}

TEST(Summary, LabelFreeResponseRetriesOnceThenFails) {
    auto provider = std::make_shared<ca_test::ScriptedProvider>(
        [](const llm::ProviderRequest&) { return "The user wants a new card and a new address."; });
    auto gw = ca_test::gateway(provider);
    try {
        summarize(*gw, handoff_transcript());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::FormatParseError);
    }
    ASSERT_EQ(provider->requests.size(), 2u);
    EXPECT_EQ(provider->requests[0].template_id, "summarize");
    EXPECT_EQ(provider->requests[1].template_id, "summarize_strict");
}

TEST(Summary, RetrySucceeds) {
    int calls = 0;
    auto gw = ca_test::gateway(std::make_shared<ca_test::ScriptedProvider>([&](const llm::ProviderRequest&) {
        return ++calls == 1 ? std::string("no labels") : std::string("Agent Action Required: A\nSummary: B");
    }));
    EXPECT_EQ(summarize(*gw, handoff_transcript()), (HandoffSummary{"A", "B"}));
}

TEST(Summary, NoUserTurnIsPrecondition) {
    auto gw = ca_test::banking_gateway();
    try {
        summarize(*gw, {{Speaker::bot, "Hi", std::nullopt}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Precondition);
    }
    EXPECT_EQ(gw->log().size(), 0u);
}

TEST(Summary, TranscriptFormat) {
    EXPECT_EQ(format_transcript({{Speaker::bot, "Hi", std::nullopt}, {Speaker::user, "Yo", std::nullopt}}),
              "Chatbot: Hi\nUser: Yo");
}
