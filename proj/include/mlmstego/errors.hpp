#pragma once

#include <stdexcept>
#include <string>

namespace mlmstego {

enum class Errc {
    empty_input,
    no_capacity,
    plan_mismatch,
    unknown_vocab_id,
    degenerate_distribution,
    capacity_exceeded,
    sequence_too_long,
    backend_failure,
    fingerprint_mismatch,
    artifact_corrupt,
    support_mismatch,
    scorer_failure,
    insufficient_data,
    invalid_config,
    io_error,
};

const char* errc_name(Errc code);

class StegError : public std::runtime_error {
public:
    StegError(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw StegError(code, message);
}

}  // namespace mlmstego
