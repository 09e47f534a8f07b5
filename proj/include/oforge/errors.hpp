#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oforge {

// Exit-code families shared with the CLI. The library throws; main() maps
// the family to the process exit code.
enum class ErrorFamily {
    kParse = 1,
    kValidation = 2,
    kCapacity = 3,
    kUnresolved = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorFamily family, const std::string& what)
        : std::runtime_error(what), family_(family) {}
    ErrorFamily family() const { return family_; }

private:
    ErrorFamily family_;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error(ErrorFamily::kParse, "line " + std::to_string(line) + ": " + what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

enum class ValidationCode {
    kEdgeGroupMismatch,        // declared H-generators do not generate the stabilizer of delta
    kEmbeddingNotHomomorphic,
    kEmbeddingNotInjective,
    kEmbeddingImageNotInVertexGroup,
    kIndexTooSmall,            // [A : H] < 2
    kLobeTooSmall,             // |delta carrier| < 3
    kLobeGroupIntransitive,
    kLobeGroupImprimitive,
    kLobeGroupRegular,
    kDiagonalLambdaArc,
    kOutOfRange,
};

const char* to_string(ValidationCode code);

class ValidationError : public Error {
public:
    ValidationError(ValidationCode code, const std::string& what)
        : Error(ErrorFamily::kValidation,
                std::string(to_string(code)) + ": " + what),
          code_(code) {}
    ValidationCode code() const { return code_; }

private:
    ValidationCode code_;
};

// Bad arguments to library operations (out-of-range points, diagonal seed
// pairs, mixed-amalgam inputs). Reported as a validation-family failure.
class InputError : public Error {
public:
    explicit InputError(const std::string& what)
        : Error(ErrorFamily::kValidation, what) {}
};

class CapacityError : public Error {
public:
    CapacityError(const std::string& what, std::size_t projected)
        : Error(ErrorFamily::kCapacity,
                what + " (projected " + std::to_string(projected) + ")"),
          projected_(projected) {}
    std::size_t projected() const { return projected_; }

private:
    std::size_t projected_;
};

class UnresolvedError : public Error {
public:
    explicit UnresolvedError(const std::string& what)
        : Error(ErrorFamily::kUnresolved, what) {}
};

}  // namespace oforge
