#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace trialkit {

/// Runtime contract violation. The code is one of the stable E_* strings
/// documented per operation; the CLI maps these to exit code 3.
class EngineError : public std::runtime_error {
public:
    EngineError(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* syntax = "E_SYNTAX";
inline constexpr const char* unknown_field = "E_UNKNOWN_FIELD";
inline constexpr const char* type = "E_TYPE";
inline constexpr const char* undefined_component = "E_UNDEFINED_COMPONENT";
inline constexpr const char* base_missing = "E_BASE_MISSING";
inline constexpr const char* base_chain = "E_BASE_CHAIN";
inline constexpr const char* name_collision = "E_NAME_COLLISION";
inline constexpr const char* numsamples_exceeds = "E_NUMSAMPLES_EXCEEDS";
inline constexpr const char* bad_spacing = "E_BAD_SPACING";
inline constexpr const char* bad_count = "E_BAD_COUNT";
inline constexpr const char* empty_block = "E_EMPTY_BLOCK";
inline constexpr const char* unknown_kind = "E_UNKNOWN_KIND";
inline constexpr const char* duplicate_response_id = "E_DUPLICATE_RESPONSE_ID";
inline constexpr const char* undefined_response = "E_UNDEFINED_RESPONSE";
inline constexpr const char* bad_library_name = "E_BAD_LIBRARY_NAME";
inline constexpr const char* dynamic_no_strategy = "E_DYNAMIC_NO_STRATEGY";
inline constexpr const char* unknown_strategy = "E_UNKNOWN_STRATEGY";
inline constexpr const char* bad_strategy_params = "E_BAD_STRATEGY_PARAMS";
inline constexpr const char* missing_block_id = "E_MISSING_BLOCK_ID";
inline constexpr const char* skip_target_undefined = "E_SKIP_TARGET_UNDEFINED";
inline constexpr const char* skip_target_unreachable = "E_SKIP_TARGET_UNREACHABLE";
inline constexpr const char* bad_order = "E_BAD_ORDER";
inline constexpr const char* double_assign = "E_DOUBLE_ASSIGN";
inline constexpr const char* not_assigned = "E_NOT_ASSIGNED";
inline constexpr const char* missing_assignment = "E_MISSING_ASSIGNMENT";
inline constexpr const char* unsatisfiable = "E_UNSATISFIABLE";
inline constexpr const char* session_ended = "E_SESSION_ENDED";
inline constexpr const char* no_pending = "E_NO_PENDING";
inline constexpr const char* missing_required = "E_MISSING_REQUIRED";
inline constexpr const char* bad_time = "E_BAD_TIME";
inline constexpr const char* bad_params = "E_BAD_PARAMS";
inline constexpr const char* terminated = "E_TERMINATED";
inline constexpr const char* short_window = "E_SHORT_WINDOW";
inline constexpr const char* not_terminated = "E_NOT_TERMINATED";
inline constexpr const char* invalid_log = "E_INVALID_LOG";
inline constexpr const char* empty = "E_EMPTY";
inline constexpr const char* attempt_cap = "E_ATTEMPT_CAP";
inline constexpr const char* io = "E_IO";
}  // namespace errc

}  // namespace trialkit
