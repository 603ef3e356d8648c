#pragma once

#include <stdexcept>
#include <string>

namespace fcvar {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FCVAR_DEFINE_ERROR(name)                 \
    class name final : public ::fcvar::Error {   \
    public:                                      \
        using ::fcvar::Error::Error;             \
    }

// data
FCVAR_DEFINE_ERROR(NonPositivePrice);
FCVAR_DEFINE_ERROR(InsufficientRows);
FCVAR_DEFINE_ERROR(WindowTooLong);
FCVAR_DEFINE_ERROR(MisalignedSeries);
FCVAR_DEFINE_ERROR(WindowOutOfRange);
FCVAR_DEFINE_ERROR(ParseError);

// timeseries
FCVAR_DEFINE_ERROR(ConstantSeries);
FCVAR_DEFINE_ERROR(OptimizerDiverged);
FCVAR_DEFINE_ERROR(AllFitsFailed);
FCVAR_DEFINE_ERROR(MissingState);

// factors
FCVAR_DEFINE_ERROR(SingularDesign);
FCVAR_DEFINE_ERROR(ZeroScale);
FCVAR_DEFINE_ERROR(OutOfDomain);
FCVAR_DEFINE_ERROR(SingularSystem);
FCVAR_DEFINE_ERROR(DomainViolation);

// nig
FCVAR_DEFINE_ERROR(NonPositiveArgument);
FCVAR_DEFINE_ERROR(SingularDispersion);
FCVAR_DEFINE_ERROR(InvalidParameter);
FCVAR_DEFINE_ERROR(RankDeficientData);

// cvaropt
FCVAR_DEFINE_ERROR(InvalidConfig);
FCVAR_DEFINE_ERROR(Infeasible);
FCVAR_DEFINE_ERROR(Unbounded);
FCVAR_DEFINE_ERROR(NumericalFailure);

// backtest / cli
FCVAR_DEFINE_ERROR(BacktestError);
FCVAR_DEFINE_ERROR(ConfigError);

#undef FCVAR_DEFINE_ERROR

}  // namespace fcvar
