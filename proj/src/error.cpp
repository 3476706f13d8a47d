#include "ca/error.hpp"

namespace ca {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingFile: return "MissingFile";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::UntrainableIntent: return "UntrainableIntent";
        case ErrorKind::EmptyUtterance: return "EmptyUtterance";
        case ErrorKind::WrongEntityKind: return "WrongEntityKind";
        case ErrorKind::UnknownTemplate: return "UnknownTemplate";
        case ErrorKind::MissingBinding: return "MissingBinding";
        case ErrorKind::ProviderTimeout: return "ProviderTimeout";
        case ErrorKind::ProviderHttpError: return "ProviderHTTPError";
        case ErrorKind::MissingFixture: return "MissingFixture";
        case ErrorKind::FixtureParseError: return "FixtureParseError";
        case ErrorKind::TemplateUnknown: return "TemplateUnknown";
        case ErrorKind::EmptyList: return "EmptyList";
        case ErrorKind::FormatParseError: return "FormatParseError";
        case ErrorKind::Precondition: return "Precondition";
        case ErrorKind::UnknownItem: return "UnknownItem";
        case ErrorKind::AlreadyDecided: return "AlreadyDecided";
        case ErrorKind::UnknownIntent: return "UnknownIntent";
        case ErrorKind::UnknownEntity: return "UnknownEntity";
        case ErrorKind::UndeclaredLocale: return "UndeclaredLocale";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, std::string message, std::vector<std::string> details, int status)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      details_(std::move(details)),
      status_(status) {}

bool Error::is_provider_error() const noexcept {
    return kind_ == ErrorKind::ProviderTimeout || kind_ == ErrorKind::ProviderHttpError ||
           kind_ == ErrorKind::MissingFixture || kind_ == ErrorKind::FixtureParseError;
}

}  // namespace ca
