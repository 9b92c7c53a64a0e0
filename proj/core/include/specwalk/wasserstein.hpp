#pragma once

#include <span>
#include <vector>

namespace specwalk {

/// Exact p-Wasserstein distance between two discrete measures on the real
/// line, computed by matching quantile functions: merge the cumulative-mass
/// breakpoints of both measures and integrate |F_mu^-1(t) - F_nu^-1(t)|^p
/// piecewise. Atoms must be ascending; masses must be positive and sum to 1
/// (they are renormalized defensively). Handles unequal atom counts exactly.
/// Returns the p-th root of the transport cost. Throws for p < 1 or an
/// empty measure.
double wasserstein_1d(std::span<const double> mu_atoms,
                      std::span<const double> mu_mass,
                      std::span<const double> nu_atoms,
                      std::span<const double> nu_mass, double p);

/// Uniform-mass convenience overload (each atom carries 1/count).
double wasserstein_1d_uniform(std::span<const double> mu_atoms,
                              std::span<const double> nu_atoms, double p);

/// Squared 2-Wasserstein distance between two histograms supported on the
/// fixed integer grid 1..d (mu_mass[i] sits at position i+1), together with
/// its gradient w.r.t. both mass vectors. The gradient is the
/// almost-everywhere derivative of the piecewise quantile integral; mass
/// vectors must be strictly positive and sum to 1.
double w2sq_grid(std::span<const double> mu_mass,
                 std::span<const double> nu_mass,
                 std::span<double> grad_mu, std::span<double> grad_nu);

/// Value-only variant.
double w2sq_grid(std::span<const double> mu_mass,
                 std::span<const double> nu_mass);

}  // namespace specwalk
