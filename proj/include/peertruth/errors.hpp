#pragma once

#include <stdexcept>
#include <string>

namespace peertruth {

// Base class for all domain errors raised by the library. CLI maps these to
// exit code 1; configuration/parse problems use ConfigError (exit code 2).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// mechanism: fewer than one other rated item exists to sample frequencies from.
struct InsufficientCorpus : Error {
    using Error::Error;
};

// benchmark model
struct EmptyTrainingSet : Error {
    using Error::Error;
};
struct SchemaMismatch : Error {
    using Error::Error;
};

// scoring variants
struct UnresolvedEvent : Error {
    using Error::Error;
};
struct NoBenchmarkData : Error {
    using Error::Error;
};

// event log
struct SequenceGap : Error {
    using Error::Error;
};
struct InvalidPayload : Error {
    using Error::Error;
};
struct UnauthorizedReset : Error {
    using Error::Error;
};
struct UnknownQuestion : Error {
    using Error::Error;
};

// token ledger
struct DuplicateAccount : Error {
    using Error::Error;
};
struct InsufficientBalance : Error {
    using Error::Error;
};
struct BidExhausted : Error {
    using Error::Error;
};
struct SelfDealing : Error {
    using Error::Error;
};
struct BountyClosed : Error {
    using Error::Error;
};
struct BelowThreshold : Error {
    using Error::Error;
};

// configuration / file parsing; carries enough context for a line/field diagnostic
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// malformed event-log line; remembers the 1-based line number
struct LogParseError : ConfigError {
    LogParseError(const std::string& what, std::size_t line)
        : ConfigError(what), line_number(line) {}
    std::size_t line_number;
};

}  // namespace peertruth
