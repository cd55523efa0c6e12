#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace availd {

/// Base for every domain failure. `code()` is the stable machine-readable
/// identifier that ends up in API error bodies.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::vector<std::string> details = {})
        : std::runtime_error(message), code_(std::move(code)), details_(std::move(details)) {}

    const std::string& code() const noexcept { return code_; }
    const std::vector<std::string>& details() const noexcept { return details_; }

private:
    std::string code_;
    std::vector<std::string> details_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message, std::vector<std::string> details = {})
        : Error("validation_error", message, std::move(details)) {}
};

/// Raised when a requested state change is not a row of the relevant
/// transition table. `rule()` names the violated rule, e.g. "incident:New->Closed".
class StateMachineError : public Error {
public:
    StateMachineError(std::string rule, const std::string& message)
        : Error("state_machine_error", message, {rule}), rule_(std::move(rule)) {}

    const std::string& rule() const noexcept { return rule_; }

private:
    std::string rule_;
};

class WorkflowError : public Error {
public:
    explicit WorkflowError(const std::string& message) : Error("workflow_error", message) {}
};

class SchedulingError : public Error {
public:
    explicit SchedulingError(const std::string& message) : Error("scheduling_error", message) {}
};

class IndependenceError : public Error {
public:
    explicit IndependenceError(const std::string& message) : Error("independence_violation", message) {}
};

/// A change was executed (or verified) without the approval that must precede it.
class AuthorizationOrderError : public Error {
public:
    explicit AuthorizationOrderError(const std::string& message)
        : Error("authorization_order_error", message) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& message) : Error("not_found", message) {}
};

class UnknownMonitorError : public Error {
public:
    explicit UnknownMonitorError(const std::string& monitor_id)
        : Error("unknown_monitor", "unknown monitor '" + monitor_id + "'") {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("parse_error", "line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class StoreError : public Error {
public:
    explicit StoreError(const std::string& message, std::vector<std::string> details = {})
        : Error("store_error", message, std::move(details)) {}
};

}  // namespace availd
