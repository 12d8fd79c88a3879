#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace matgraph {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Precondition violation: dimension mismatch, unknown node id, bad argument.
class ContractError : public Error {
    using Error::Error;
};

/// matrix_build rejected a tuple (index out of bounds, inconsistent values).
class BuildError : public Error {
    using Error::Error;
};

/// Lexer or parser failure. `offset` is the byte position in the query text;
/// it is always <= the length of the input.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error(message), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Query planning failure: type errors, unsupported constructs. `offset` is
/// the byte position of the offending expression in the query text.
class PlanError : public Error {
public:
    PlanError(std::size_t offset, const std::string& message)
        : Error(message), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Snapshot save/load failure. `line` is 1-based; 0 when no line applies.
class SnapshotError : public Error {
public:
    explicit SnapshotError(const std::string& message, std::size_t line = 0)
        : Error(message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Benchmark harness setup failure (not enough seeds, bad parameters).
class HarnessError : public Error {
    using Error::Error;
};

}  // namespace matgraph
