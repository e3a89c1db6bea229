#pragma once

#include <stdexcept>
#include <string>

namespace datalens {

// Every recoverable failure in the library is reported through one of these.
// `kind` carries a stable machine-readable tag so the CLI can map failures
// onto structured error output without parsing messages.
class Error : public std::runtime_error {
public:
    enum class Kind {
        config,           // invalid configuration / precondition violation
        parse,            // malformed input file
        numeric,          // non-finite values, solver breakdown
        missing_artifact, // a required prior-stage file does not exist
        version_mismatch, // artifact format version is not supported
        internal,
    };

    Error(Kind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

    const char* kind_name() const noexcept {
        switch (kind_) {
        case Kind::config: return "config";
        case Kind::parse: return "parse";
        case Kind::numeric: return "numeric";
        case Kind::missing_artifact: return "missing_artifact";
        case Kind::version_mismatch: return "version_mismatch";
        case Kind::internal: return "internal";
        }
        return "unknown";
    }

private:
    Kind kind_;
};

[[noreturn]] inline void fail(Error::Kind kind, std::string message) {
    throw Error(kind, std::move(message));
}

inline void require(bool condition, Error::Kind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

} // namespace datalens
