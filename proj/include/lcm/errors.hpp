#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcm {

/// Base class of every error raised by the library. The CLI maps these to
/// exit status 2 (data/validation error).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// p(v,n) == 0, so p(c|v,n) does not exist.
class UndefinedPosteriorError : public Error {
public:
    using Error::Error;
};

/// p(v) == 0, so p(n|v) does not exist.
class UndefinedConditionalError : public Error {
public:
    using Error::Error;
};

/// An observed pair has zero probability; the log-likelihood is -inf.
class ZeroLikelihoodError : public Error {
public:
    using Error::Error;
};

/// EM cannot proceed because an observed pair has zero probability.
class TrainingDegeneracyError : public Error {
public:
    TrainingDegeneracyError(const std::string& what, std::size_t iteration = 0)
        : Error(what), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class EmptyEvaluationError : public Error {
public:
    using Error::Error;
};

class EmptySampleError : public Error {
public:
    using Error::Error;
};

class EmptyResultsError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace lcm
