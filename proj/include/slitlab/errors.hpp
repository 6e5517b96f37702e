#pragma once

#include <stdexcept>
#include <string>

namespace slitlab {

enum class ErrorKind {
    domain,
    unknown_species,
    grid_too_small,
    empty_field,
    not_applicable,
    precondition,
    resolution,
    model_bound,
    config_parse,
    config_unit,
    config_unknown_key,
    config_value,
    io,
};

const char* to_string(ErrorKind kind);

/// Base for every error raised by the library. The kind tag lets the CLI map
/// errors onto exit codes without a catch ladder.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    bool is_validation() const noexcept;

private:
    ErrorKind kind_;
};

#define SLITLAB_DEFINE_ERROR(Name, Kind)                                   \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    };

SLITLAB_DEFINE_ERROR(DomainError, domain)
SLITLAB_DEFINE_ERROR(UnknownSpeciesError, unknown_species)
SLITLAB_DEFINE_ERROR(GridError, grid_too_small)
SLITLAB_DEFINE_ERROR(EmptyFieldError, empty_field)
SLITLAB_DEFINE_ERROR(NotApplicableError, not_applicable)
SLITLAB_DEFINE_ERROR(PreconditionError, precondition)
SLITLAB_DEFINE_ERROR(ResolutionError, resolution)
SLITLAB_DEFINE_ERROR(ModelBoundError, model_bound)
SLITLAB_DEFINE_ERROR(IoError, io)

#undef SLITLAB_DEFINE_ERROR

/// Configuration errors carry the offending key and, for syntax errors, the
/// 1-based source position.
class ConfigError : public Error {
public:
    ConfigError(ErrorKind kind, const std::string& what, std::string key = {},
                int line = 0, int column = 0)
        : Error(kind, what), key_(std::move(key)), line_(line), column_(column) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    std::string key_;
    int line_;
    int column_;
};

}  // namespace slitlab
