#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grantmatch {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

// confidence(X => Y) with supp(X) == 0
class UndefinedConfidenceError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Corpus or staged-file content that cannot be processed.
class InputError : public Error {
public:
    using Error::Error;
};

// An estimate references a field the taxonomy does not know.
class TaxonomyMismatchError : public InputError {
public:
    using InputError::InputError;
};

} // namespace grantmatch
