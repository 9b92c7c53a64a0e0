#include "specwalk/wasserstein.hpp"

#include <algorithm>
#include <cmath>

#include "specwalk/errors.hpp"

namespace specwalk {

namespace {

double ground_cost_pow(double a, double b, double p) {
  const double d = std::fabs(a - b);
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

}  // namespace

double wasserstein_1d(std::span<const double> mu_atoms,
                      std::span<const double> mu_mass,
                      std::span<const double> nu_atoms,
                      std::span<const double> nu_mass, double p) {
  if (p < 1.0) throw usage_error("wasserstein_1d: order p must be >= 1");
  if (mu_atoms.empty() || nu_atoms.empty())
    throw usage_error("wasserstein_1d: empty measure");

  double mu_total = 0.0, nu_total = 0.0;
  for (double w : mu_mass) mu_total += w;
  for (double w : nu_mass) nu_total += w;

  std::size_t i = 0, j = 0;
  double rem_i = mu_mass[0] / mu_total;
  double rem_j = nu_mass[0] / nu_total;
  double cost = 0.0;
  while (true) {
    const double step = std::min(rem_i, rem_j);
    cost += step * ground_cost_pow(mu_atoms[i], nu_atoms[j], p);
    rem_i -= step;
    rem_j -= step;
    if (rem_i <= 0.0) {
      if (++i == mu_atoms.size()) break;
      rem_i = mu_mass[i] / mu_total;
    }
    if (rem_j <= 0.0) {
      if (++j == nu_atoms.size()) break;
      rem_j = nu_mass[j] / nu_total;
    }
  }
  if (p == 1.0) return cost;
  if (p == 2.0) return std::sqrt(cost);
  return std::pow(cost, 1.0 / p);
}

double wasserstein_1d_uniform(std::span<const double> mu_atoms,
                              std::span<const double> nu_atoms, double p) {
  std::vector<double> wa(mu_atoms.size(), 1.0 / mu_atoms.size());
  std::vector<double> wb(nu_atoms.size(), 1.0 / nu_atoms.size());
  return wasserstein_1d(mu_atoms, wa, nu_atoms, wb, p);
}

double w2sq_grid(std::span<const double> mu_mass,
                 std::span<const double> nu_mass) {
  const std::size_t da = mu_mass.size(), db = nu_mass.size();
  std::size_t i = 0, j = 0;
  double rem_i = mu_mass[0], rem_j = nu_mass[0];
  double cost = 0.0;
  while (true) {
    const double step = std::min(rem_i, rem_j);
    if (!(step >= 0.0))
      throw numeric_error("w2sq_grid: non-finite mass (diverged input)");
    const double diff = static_cast<double>(i) - static_cast<double>(j);
    cost += step * diff * diff;
    rem_i -= step;
    rem_j -= step;
    if (rem_i <= 0.0) {
      if (++i == da) break;
      rem_i = mu_mass[i];
    }
    if (rem_j <= 0.0) {
      if (++j == db) break;
      rem_j = nu_mass[j];
    }
  }
  return cost;
}

double w2sq_grid(std::span<const double> mu_mass,
                 std::span<const double> nu_mass, std::span<double> grad_mu,
                 std::span<double> grad_nu) {
  const double cost = w2sq_grid(mu_mass, nu_mass);
  const std::size_t da = mu_mass.size(), db = nu_mass.size();

  std::vector<double> cum_a(da), cum_b(db);
  double acc = 0.0;
  for (std::size_t i = 0; i < da; ++i) cum_a[i] = (acc += mu_mass[i]);
  acc = 0.0;
  for (std::size_t j = 0; j < db; ++j) cum_b[j] = (acc += nu_mass[j]);

  // Quantile position of the other measure at cumulative mass t. At a tied
  // breakpoint the left and right limits differ; averaging them picks the
  // symmetric subgradient, which vanishes at mu == nu (a global minimum).
  auto quantile_after = [](const std::vector<double>& cum, double t) {
    auto hi = std::upper_bound(cum.begin(), cum.end(), t);
    auto lo = std::lower_bound(cum.begin(), cum.end(), t);
    auto clamp_idx = [&](std::ptrdiff_t idx) {
      return static_cast<double>(
          std::min<std::ptrdiff_t>(idx, static_cast<std::ptrdiff_t>(cum.size()) - 1));
    };
    return 0.5 * (clamp_idx(hi - cum.begin()) + clamp_idx(lo - cum.begin()));
  };

  // Moving breakpoint A_k right extends the span where the mu-quantile is
  // atom k and shrinks atom k+1; the integrand jump is the derivative.
  // Mass i feeds every breakpoint A_k with k >= i, hence the suffix sums.
  // The result is the a.e. gradient up to an additive constant on the
  // simplex, which the softmax chain rule cancels.
  std::vector<double> sens(da > 0 ? da - 1 : 0, 0.0);
  for (std::size_t k = 0; k + 1 < da; ++k) {
    const double q = quantile_after(cum_b, cum_a[k]);
    const double left = static_cast<double>(k) - q;
    const double right = static_cast<double>(k + 1) - q;
    sens[k] = left * left - right * right;
  }
  grad_mu[da - 1] = 0.0;
  double run = 0.0;
  for (std::size_t i = da - 1; i-- > 0;) {
    run += sens[i];
    grad_mu[i] = run;
  }

  std::vector<double> sens_b(db > 0 ? db - 1 : 0, 0.0);
  for (std::size_t k = 0; k + 1 < db; ++k) {
    const double q = quantile_after(cum_a, cum_b[k]);
    const double left = q - static_cast<double>(k);
    const double right = q - static_cast<double>(k + 1);
    sens_b[k] = left * left - right * right;
  }
  grad_nu[db - 1] = 0.0;
  run = 0.0;
  for (std::size_t j = db - 1; j-- > 0;) {
    run += sens_b[j];
    grad_nu[j] = run;
  }
  return cost;
}

}  // namespace specwalk
