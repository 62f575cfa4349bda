#pragma once

#include <stdexcept>
#include <string>

namespace orbinspect {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ORBINSPECT_DEFINE_ERROR(Name)            \
    class Name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

ORBINSPECT_DEFINE_ERROR(ConfigError);
ORBINSPECT_DEFINE_ERROR(SingularTransfer);
ORBINSPECT_DEFINE_ERROR(DegenerateCamera);
ORBINSPECT_DEFINE_ERROR(HullDegenerate);
ORBINSPECT_DEFINE_ERROR(UnsupportedFormat);
ORBINSPECT_DEFINE_ERROR(InvalidAction);
ORBINSPECT_DEFINE_ERROR(EpisodeDone);
ORBINSPECT_DEFINE_ERROR(LengthMismatch);
ORBINSPECT_DEFINE_ERROR(DimensionMismatch);
ORBINSPECT_DEFINE_ERROR(BadMagic);
ORBINSPECT_DEFINE_ERROR(VersionUnsupported);
ORBINSPECT_DEFINE_ERROR(TruncatedPayload);
ORBINSPECT_DEFINE_ERROR(IoError);

#undef ORBINSPECT_DEFINE_ERROR

/// PLY parse failure; `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Fixed-point thrust solve did not settle within the iteration budget.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Navigation ran out of its arrival window without reaching the goal.
class ArrivalFailure : public Error {
public:
    ArrivalFailure(const std::string& what, double closest_distance, double closest_time)
        : Error(what), closest_distance_(closest_distance), closest_time_(closest_time) {}
    double closest_distance() const noexcept { return closest_distance_; }
    double closest_time() const noexcept { return closest_time_; }

private:
    double closest_distance_;
    double closest_time_;
};

}  // namespace orbinspect
