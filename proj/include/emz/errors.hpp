#pragma once

#include <stdexcept>
#include <string>

namespace emz {

// Base class for all typed failures raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define EMZ_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                         \
    public:                                                             \
        explicit Name(const std::string& msg) : Error(msg) {}           \
    }

EMZ_DEFINE_ERROR(WindowMismatch);
EMZ_DEFINE_ERROR(SchemaError);
EMZ_DEFINE_ERROR(ParseError);
EMZ_DEFINE_ERROR(InvalidMatrix);
EMZ_DEFINE_ERROR(StepSizeTooCoarse);
EMZ_DEFINE_ERROR(QuadratureFailure);
EMZ_DEFINE_ERROR(UnsupportedFamily);
EMZ_DEFINE_ERROR(ContinuousSpectrumOnly);
EMZ_DEFINE_ERROR(SymbolicACUnsupported);
EMZ_DEFINE_ERROR(UnboundedFunction);
EMZ_DEFINE_ERROR(EnumerationBudgetExceeded);
EMZ_DEFINE_ERROR(UnknownSolutionBasis);
EMZ_DEFINE_ERROR(DimensionMismatch);

#undef EMZ_DEFINE_ERROR

} // namespace emz
