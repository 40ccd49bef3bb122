#pragma once

#include <stdexcept>
#include <string>

namespace attrikit {

// Every failure the toolkit can raise, one code per spec-visible error
// condition. The C API maps these 1:1 onto its status codes.
enum class Errc {
    Ok = 0,
    Io,
    EmptyFile,
    DuplicateColumn,
    MissingValue,
    UnknownColumn,
    NonNumericColumn,
    DegenerateColumn,
    NegativeValue,
    UnseenCategory,
    ClassTooSmall,
    ZeroVariance,
    SingleClass,
    TooFewMinoritySamples,
    DimensionMismatch,
    KTooLarge,
    LengthMismatch,
    NonBinaryLabel,
    EmptyReport,
    VersionMismatch,
    CorruptPayload,
    Auth,
    Service,
    RateLimited,
    Timeout,
    PortInUse,
    ConfigParse,
    ConfigUnknownKey,
    ConfigMissingRequired,
    Internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code),
          message_(message) {}

    Errc code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

private:
    Errc code_;
    std::string message_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace attrikit
