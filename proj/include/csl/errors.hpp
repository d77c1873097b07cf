#pragma once

#include <stdexcept>
#include <string>

namespace csl {

// Base class for all library failures. Every concrete error carries a
// stable nonzero exit code so the command line tool can map each failure
// category to a distinct process status.
class Error : public std::runtime_error {
public:
    Error(const std::string& what, int exit_code)
        : std::runtime_error(what), exit_code_(exit_code) {}

    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

#define CSL_ERROR_TYPE(NAME, CODE)                              \
    class NAME : public Error {                                 \
    public:                                                     \
        explicit NAME(const std::string& detail)                \
            : Error(std::string(#NAME) + ": " + detail, CODE) {} \
        static constexpr int code = CODE;                       \
    }

CSL_ERROR_TYPE(LengthMismatch, 10);
CSL_ERROR_TYPE(NonBinaryTreatment, 11);
CSL_ERROR_TYPE(NotPositiveSemiDefinite, 12);
CSL_ERROR_TYPE(InvalidConfig, 13);
CSL_ERROR_TYPE(MissingArm, 14);
CSL_ERROR_TYPE(MissingSurrogate, 15);
CSL_ERROR_TYPE(DegenerateTarget, 16);
CSL_ERROR_TYPE(DimensionMismatch, 17);
CSL_ERROR_TYPE(EmptyArmInStratum, 18);
CSL_ERROR_TYPE(PropensityOutOfRange, 19);
CSL_ERROR_TYPE(TooFewUnits, 20);
CSL_ERROR_TYPE(GridMismatch, 21);
CSL_ERROR_TYPE(EmptySelection, 22);
CSL_ERROR_TYPE(MisalignedInputs, 23);
CSL_ERROR_TYPE(MissingColumn, 24);
CSL_ERROR_TYPE(MalformedRow, 25);
CSL_ERROR_TYPE(InvalidSplitSize, 26);
CSL_ERROR_TYPE(IoFailure, 27);
CSL_ERROR_TYPE(SchemaVersionMismatch, 28);
CSL_ERROR_TYPE(UnknownMetric, 29);
CSL_ERROR_TYPE(UnknownFigure, 30);

#undef CSL_ERROR_TYPE

} // namespace csl
