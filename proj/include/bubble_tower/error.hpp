#ifndef BUBBLE_TOWER_ERROR_HPP
#define BUBBLE_TOWER_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bubble_tower {

/// Failure kinds raised by the library. Each maps onto one of three
/// categories (configuration, numerical, I/O) used for CLI exit codes.
enum class Errc {
    invalid_parameter,
    invalid_potential,
    dimension,
    shape,
    no_ground_state,
    integration,
    non_converged_tail,
    quadrature,
    degenerate_layer,
    search_failure,
    resolution,
    io
};

enum class ErrorCategory { config, numerical, io };

inline ErrorCategory category_of(Errc code)
{
    switch (code) {
        case Errc::invalid_parameter:
        case Errc::invalid_potential:
        case Errc::dimension:
        case Errc::shape:
            return ErrorCategory::config;
        case Errc::io:
            return ErrorCategory::io;
        default:
            return ErrorCategory::numerical;
    }
}

inline const char* to_string(Errc code)
{
    switch (code) {
        case Errc::invalid_parameter: return "invalid-parameter";
        case Errc::invalid_potential: return "invalid-potential";
        case Errc::dimension: return "dimension";
        case Errc::shape: return "shape";
        case Errc::no_ground_state: return "no-ground-state";
        case Errc::integration: return "integration";
        case Errc::non_converged_tail: return "non-converged-tail";
        case Errc::quadrature: return "quadrature";
        case Errc::degenerate_layer: return "degenerate-layer";
        case Errc::search_failure: return "search-failure";
        case Errc::resolution: return "resolution";
        case Errc::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
  public:
    Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what)
      , code_(code)
    {}

    Errc code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

    /// 2 = configuration, 3 = numerical failure, 4 = I/O.
    int exit_status() const noexcept
    {
        switch (category()) {
            case ErrorCategory::config: return 2;
            case ErrorCategory::numerical: return 3;
            case ErrorCategory::io: return 4;
        }
        return 1;
    }

  private:
    Errc code_;
};

} // namespace bubble_tower

#endif
