#pragma once
#include <stdexcept>
#include <string>

namespace augsearch {

// Exit-code mapping lives in the CLI: validation 3, transport 4, numeric 5.

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, long line) : std::runtime_error(msg), line(line) {}
    long line;
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExtractionError : std::runtime_error {
    ExtractionError(const std::string& msg, std::string raw)
        : std::runtime_error(msg), raw_text(std::move(raw)) {}
    std::string raw_text;
};

struct CredentialError : std::runtime_error {
    explicit CredentialError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyResponseError : std::runtime_error {
    explicit EmptyResponseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateVectorError : std::runtime_error {
    explicit DegenerateVectorError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& msg, long step) : std::runtime_error(msg), step(step) {}
    long step;
};

// A code transform had no applicable site; the caller picks another one.
struct InapplicableError : std::runtime_error {
    explicit InapplicableError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace augsearch
