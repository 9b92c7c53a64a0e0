#pragma once

// Independent test oracles. Everything here deliberately avoids the library's
// own algorithms: transport is solved as a min-cost flow, eigenvalues come
// from characteristic-polynomial root finding, cover times from an exact
// linear system over (visited-set, position) states.

#include <functional>
#include <vector>

#include "specwalk/spectral.hpp"

namespace oracle {

/// Exact p-Wasserstein between discrete measures with rational masses given
/// as integer units (unit_a[i] units at atom_a[i]; totals must match).
/// Solved by successive-shortest-path min-cost flow on the bipartite
/// transport graph. Returns the p-th root of the optimal cost.
double transport_lp(const std::vector<double>& atoms_a,
                    const std::vector<long long>& units_a,
                    const std::vector<double>& atoms_b,
                    const std::vector<long long>& units_b, double p);

/// Uniform measures: every atom of a measure carries equal mass.
double transport_lp_uniform(const std::vector<double>& atoms_a,
                            const std::vector<double>& atoms_b, double p);

/// All real eigenvalues (ascending, with multiplicity) of a symmetric matrix
/// up to 5x5, via Faddeev-LeVerrier characteristic-polynomial coefficients
/// and closed-form / Sturm-bisection root finding.
std::vector<double> charpoly_eigenvalues(const specwalk::SymMatrix& m);

/// Central finite difference of `loss` w.r.t. `*param` (restores the value).
double fd_gradient(const std::function<double()>& loss, double* param,
                   double step = 1e-5);

/// Expected walk length (counting vertices, start included) until every
/// vertex of `targets` has been visited, for the Markov chain with row-
/// stochastic transition matrix P (n x n, row-major), starting at `start`.
/// Exact: solves the linear system over (visited-mask, position) states.
/// Feasible for n <= ~12.
double expected_cover_length(const std::vector<double>& P, int n, int start,
                             const std::vector<int>& targets);

/// Stationary distribution of a row-stochastic matrix by power iteration.
std::vector<double> stationary_distribution(const std::vector<double>& P,
                                            int n, int iters = 20000);

}  // namespace oracle
