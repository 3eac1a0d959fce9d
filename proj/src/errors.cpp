#include "mlmstego/errors.hpp"

namespace mlmstego {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::empty_input: return "EmptyInput";
        case Errc::no_capacity: return "NoCapacity";
        case Errc::plan_mismatch: return "PlanMismatch";
        case Errc::unknown_vocab_id: return "UnknownVocabId";
        case Errc::degenerate_distribution: return "DegenerateDistribution";
        case Errc::capacity_exceeded: return "CapacityExceeded";
        case Errc::sequence_too_long: return "SequenceTooLong";
        case Errc::backend_failure: return "BackendFailure";
        case Errc::fingerprint_mismatch: return "FingerprintMismatch";
        case Errc::artifact_corrupt: return "ArtifactCorrupt";
        case Errc::support_mismatch: return "SupportMismatch";
        case Errc::scorer_failure: return "ScorerFailure";
        case Errc::insufficient_data: return "InsufficientData";
        case Errc::invalid_config: return "InvalidConfig";
        case Errc::io_error: return "IoError";
    }
    return "UnknownError";
}

}  // namespace mlmstego
