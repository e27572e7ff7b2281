#pragma once

#include <span>

namespace physioemo {

/// Coefficient of determination 1 - SS_res / SS_tot. Throws LengthMismatch
/// and ZeroVariance.
double r2_score(std::span<const double> y, std::span<const double> yhat);

/// Mean of squared errors. Throws LengthMismatch.
double mse(std::span<const double> y, std::span<const double> yhat);

}  // namespace physioemo
