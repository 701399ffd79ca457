#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ddm {

// All domain errors carry a module name and a stable code so the CLI can
// emit machine-readable error reports.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string code, const std::string& message)
        : std::runtime_error(module + "/" + code + ": " + message),
          module_(std::move(module)),
          code_(std::move(code)),
          message_(message) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string module_;
    std::string code_;
    std::string message_;
};

[[noreturn]] inline void fail(const std::string& module, const std::string& code,
                              const std::string& message) {
    throw Error(module, code, message);
}

// Chance-constrained synthesis reports the best attainable on-time
// probability alongside the failure.
class InfeasibleThreshold : public Error {
public:
    InfeasibleThreshold(const std::string& message, double max_achievable)
        : Error("product-mdp", "Infeasible", message),
          max_achievable_(max_achievable) {}

    double max_achievable() const noexcept { return max_achievable_; }

private:
    double max_achievable_;
};

}  // namespace ddm
