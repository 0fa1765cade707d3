#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mimocap {

/// Base for every numeric-library failure. Carries the name of the operation
/// that raised it so front ends can report which step failed.
class Error : public std::runtime_error {
public:
    Error(std::string operation, const std::string& what)
        : std::runtime_error(operation + ": " + what), operation_(std::move(operation)) {}

    const std::string& operation() const noexcept { return operation_; }

private:
    std::string operation_;
};

#define MIMOCAP_DEFINE_ERROR(Name)                   \
    class Name : public Error {                      \
    public:                                          \
        using Error::Error;                          \
    }

MIMOCAP_DEFINE_ERROR(ShapeError);
MIMOCAP_DEFINE_ERROR(SymmetryError);
MIMOCAP_DEFINE_ERROR(DefinitenessError);
MIMOCAP_DEFINE_ERROR(DomainError);
MIMOCAP_DEFINE_ERROR(SingularChannelError);
MIMOCAP_DEFINE_ERROR(InsufficientSamplesError);
MIMOCAP_DEFINE_ERROR(DegenerateChannelError);
MIMOCAP_DEFINE_ERROR(ConstraintError);

#undef MIMOCAP_DEFINE_ERROR

} // namespace mimocap
