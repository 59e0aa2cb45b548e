#pragma once

#include <stdexcept>
#include <string>

namespace maxshape {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for problems that stem from user input rather than from the numerics.
struct InputError : Error {
    using Error::Error;
};

#define MAXSHAPE_ERROR(Name, Base)            \
    struct Name : Base {                      \
        explicit Name(const std::string& m)   \
            : Base(#Name ": " + m) {}         \
    };

MAXSHAPE_ERROR(NonPositiveRadial, InputError)
MAXSHAPE_ERROR(ResolutionTooLow, InputError)
MAXSHAPE_ERROR(InadmissibleDeformation, Error)
MAXSHAPE_ERROR(GridMismatch, Error)
MAXSHAPE_ERROR(NearTangentNormals, Error)
MAXSHAPE_ERROR(NonZeroMean, Error)
MAXSHAPE_ERROR(KindMismatch, Error)
MAXSHAPE_ERROR(TargetOnSurface, Error)
MAXSHAPE_ERROR(AssemblyFailure, Error)
MAXSHAPE_ERROR(SingularSystem, Error)
MAXSHAPE_ERROR(NoConvergence, Error)
MAXSHAPE_ERROR(TraceEvaluationFailure, Error)
MAXSHAPE_ERROR(SeriesNotConverged, Error)

#undef MAXSHAPE_ERROR

}  // namespace maxshape
