#include "ca/error.hpp"
#include "ca/nlg.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace ca;

TEST(SelectVariant, FallsBackToDefaultLocale) {
    const auto c = ca_test::banking();
    EXPECT_EQ(nlg::select_variant(c, "pay_bill", "fr", "").locale, "en");
}

TEST(SelectVariant, PersonaVariantWinsWhenPresent) {
    const auto c = ca_test::banking();
    const auto& v = nlg::select_variant(c, "product_unavailable", "en", "british_upper_class");
    EXPECT_EQ(v.persona, "british_upper_class");
    EXPECT_TRUE(nlg::has_persona_variant(c, "product_unavailable", "en", "british_upper_class"));
    EXPECT_FALSE(nlg::has_persona_variant(c, "pay_bill", "en", "british_upper_class"));
    EXPECT_EQ(nlg::select_variant(c, "pay_bill", "en", "british_upper_class").persona, "");
}

TEST(SelectVariant, UnknownKeyThrows) {
    try {
        nlg::select_variant(ca_test::banking(), "nope", "en", "");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownTemplate);
    }
}

TEST(Render, BindsPlaceholders) {
    nlg::RenderRequest r;
    r.key = "transfer_summary";
    r.bindings = {{"amount", "400 USD"}, {"source_account", "334402"}, {"dest_account", "831123"}};
    EXPECT_EQ(nlg::render(ca_test::banking(), r),
              "money transfer of 400 USD from account 334402 to account 831123");
}

TEST(Render, MissingBindingThrows) {
    nlg::RenderRequest r;
    r.key = "transfer_summary";
    r.bindings = {{"amount", "400 USD"}};
    try {
        nlg::render(ca_test::banking(), r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingBinding);
    }
}

TEST(Render, FallbackLadderIndexesAndClamps) {
    const auto c = ca_test::banking();
    ASSERT_EQ(nlg::variant_count(c, "fallback"), 10u);
    nlg::RenderRequest r;
    r.key = "fallback";
    r.variant_index = 0;
    EXPECT_EQ(nlg::render(c, r), "Sorry, I didn't quite get that. Could you rephrase your statement, please?");
    r.variant_index = 42;
    EXPECT_EQ(nlg::render(c, r), c.template_for("fallback")->variants[0].texts[9]);
}

TEST(Render, LocaleVariantAfterAdding) {
    auto c = ca_test::banking();
    c.template_for("pay_bill")->variants.push_back({"de", "", {"Rechnungen zahlen Sie im Bereich Zahlungen."}});
    nlg::RenderRequest r;
    r.key = "pay_bill";
    r.locale = "de";
    EXPECT_EQ(nlg::render(c, r), "Rechnungen zahlen Sie im Bereich Zahlungen.");
}

TEST(SlotPrompt, RendersSlotTemplate) {
    const auto c = ca_test::banking();
    EXPECT_EQ(nlg::render_slot_prompt(c, "money_transfer", "dest_account", {}),
              "Please provide the recipient's bank account number.");
    EXPECT_THROW(nlg::render_slot_prompt(c, "money_transfer", "iban", {}), Error);
}
