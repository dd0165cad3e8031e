#pragma once

#include <stdexcept>
#include <string>

namespace levyfield {

// Validation errors: bad parameters, violated preconditions, unsupported shapes.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric errors: budget exceeded, non-convergence, divergent quantities.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RequestUnavailable : ValidationError {
    using ValidationError::ValidationError;
};
struct MomentUnavailable : ValidationError {
    using ValidationError::ValidationError;
};
struct CaseInapplicable : ValidationError {
    using ValidationError::ValidationError;
};
struct ConditionViolated : ValidationError {
    using ValidationError::ValidationError;
};
struct UnsupportedShape : ValidationError {
    using ValidationError::ValidationError;
};
struct ParameterOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};
struct ExponentInvalid : ValidationError {
    using ValidationError::ValidationError;
};
struct ShiftTooLarge : ValidationError {
    using ValidationError::ValidationError;
};
struct HorizonNotReached : ValidationError {
    using ValidationError::ValidationError;
};
struct NotSummable : NumericError {
    using NumericError::NumericError;
};
struct Diverges : NumericError {
    using NumericError::NumericError;
};
struct TooFewValues : ValidationError {
    using ValidationError::ValidationError;
};
struct VarianceUnavailable : ValidationError {
    using ValidationError::ValidationError;
};
struct PlanBiasTooLarge : ValidationError {
    using ValidationError::ValidationError;
};
struct DegenerateDomain : ValidationError {
    using ValidationError::ValidationError;
};
struct DoubleIntegralBudgetExceeded : NumericError {
    using NumericError::NumericError;
};

} // namespace levyfield
