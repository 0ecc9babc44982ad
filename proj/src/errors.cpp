#include "stochsync/errors.hpp"

namespace stochsync {

IntegrationBlowup::IntegrationBlowup(double time, double state_norm)
    : NumericError("integration blowup at t=" + std::to_string(time) +
                   " (|x|=" + std::to_string(state_norm) + ")"),
      time_(time),
      state_norm_(state_norm) {}

ConfigError::ConfigError(std::string field, const std::string& message, int line)
    : ValidationError(field + (line >= 0 ? " (line " + std::to_string(line) + ")" : "") + ": " +
                      message),
      field_(std::move(field)),
      line_(line) {}

}  // namespace stochsync
