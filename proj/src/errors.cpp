#include "slitlab/errors.hpp"

namespace slitlab {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::unknown_species: return "unknown-species";
    case ErrorKind::grid_too_small: return "grid-too-small";
    case ErrorKind::empty_field: return "empty-field";
    case ErrorKind::not_applicable: return "not-applicable";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::model_bound: return "model-violates-bound";
    case ErrorKind::config_parse: return "config-parse";
    case ErrorKind::config_unit: return "config-unit";
    case ErrorKind::config_unknown_key: return "config-unknown-key";
    case ErrorKind::config_value: return "config-value";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

bool Error::is_validation() const noexcept
{
    switch (kind_) {
    case ErrorKind::config_parse:
    case ErrorKind::config_unit:
    case ErrorKind::config_unknown_key:
    case ErrorKind::config_value:
    case ErrorKind::unknown_species:
        return true;
    default:
        return false;
    }
}

}  // namespace slitlab
