#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ca {

enum class ErrorKind {
    MissingFile,
    ParseError,
    ValidationError,
    IoError,
    UntrainableIntent,
    EmptyUtterance,
    WrongEntityKind,
    UnknownTemplate,
    MissingBinding,
    ProviderTimeout,
    ProviderHttpError,
    MissingFixture,
    FixtureParseError,
    TemplateUnknown,
    EmptyList,
    FormatParseError,
    Precondition,
    UnknownItem,
    AlreadyDecided,
    UnknownIntent,
    UnknownEntity,
    UndeclaredLocale,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the engine. `details` carries the full violation
/// list for ValidationError, the raw provider response for generation errors.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, std::vector<std::string> details = {},
          int status = 0);

    ErrorKind kind() const noexcept { return kind_; }
    const std::vector<std::string>& details() const noexcept { return details_; }
    int status() const noexcept { return status_; }

    bool is_provider_error() const noexcept;

private:
    ErrorKind kind_;
    std::vector<std::string> details_;
    int status_;
};

}  // namespace ca
