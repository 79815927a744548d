#ifndef SLOWFAST_MODELS_FUTILE_CYCLE_HPP
#define SLOWFAST_MODELS_FUTILE_CYCLE_HPP

#include <complex>
#include <vector>

#include "slowfast/domain.hpp"
#include "slowfast/monotone.hpp"
#include "slowfast/system.hpp"

namespace slowfast::models {

/// Rate constants and totals of the dual phosphorylation-dephosphorylation
/// cycle. The kinase branch is k*, the phosphatase branch h*. Validated
/// eagerly: every constant positive and eps = E_tot/S_tot within (0, eps0]
/// for eps0 = 1/(1+c), c = F_tot/E_tot.
struct FutileCycleParams {
  double k1, k_m1, k2, k3, k_m3, k4;
  double h1, h_m1, h2, h3, h_m3, h4;
  double S_tot, E_tot, F_tot;

  double eps() const { return E_tot / S_tot; }
  double c() const { return F_tot / E_tot; }
  double eps0() const { return 1.0 / (1.0 + c()); }

  double Km1() const { return (k_m1 + k2) / k1; }
  double Km2() const { return (k_m3 + k4) / k3; }
  double Km3() const { return (h_m1 + h2) / h1; }
  double Km4() const { return (h_m3 + h4) / h3; }

  void validate() const;
  ParameterSet to_parameter_set() const;

  /// Canonical test set: every rate 1, S_tot = 1, c = 1.
  static FutileCycleParams all_ones(double eps = 0.1);
  /// A parameter set with two stable equilibria and a saddle in the reduced
  /// system (zero-order kinetic regime, symmetric branches).
  static FutileCycleParams bistable(double eps = 1e-3);
  /// Same rates, rescaled totals so E_tot/S_tot = eps with c preserved.
  FutileCycleParams with_eps(double eps) const;
};

/// Mass-action model in the 6-state chart [S0, S2, C1, C2, C4, C3]; the
/// remaining species S1, E, F are recovered from the conservation relations.
/// A 9-species expansion [S0, S1, S2, C1, C2, C3, C4, E, F] is provided for
/// checks where the totals are genuine functionals of the solution rather
/// than constants by construction.
class MassActionModel {
public:
  explicit MassActionModel(FutileCycleParams p);

  const FutileCycleParams& params() const { return p_; }

  Vec rhs6(const Vec& s) const;
  /// (S1, E, F) from the conservation relations.
  Vec recovered(const Vec& s6) const;
  /// Totals (S_tot, E_tot, F_tot) evaluated on a 9-species state.
  Vec totals9(const Vec& s9) const;
  Vec rhs9(const Vec& s9) const;
  Vec expand(const Vec& s6) const;
  Vec restrict_to6(const Vec& s9) const;

  /// Throws InvalidStateError when a concentration (explicit or recovered)
  /// is negative beyond roundoff.
  void validate_initial(const Vec& s6) const;

  OdeFn ode6() const;
  OdeFn ode9() const;

private:
  FutileCycleParams p_;
};

MassActionModel futile_cycle_mass_action(const FutileCycleParams& p);

/// Scaled slow-fast form of the cycle. `scale` is the concentration unit A
/// of the slow variables (x1 = [S0]/A, x2 = [S2]/A); the standard scaling
/// uses A = S_tot, the alternative uses A = S_tot + Km1 + Km2 + Km3 + Km4.
/// The substrate simplex bound is b = S_tot/A and the singular parameter is
/// eps = E_tot/A.
struct ScaledFutileCycle {
  SlowFastSystem system;
  EpsPolytope domain;
  SlowDomain slow_domain;
  FutileCycleParams params;
  double scale;
  double bound;
};

ScaledFutileCycle futile_cycle_scaled(const FutileCycleParams& p);
ScaledFutileCycle futile_cycle_scaled_with(const FutileCycleParams& p, double scale);

/// Closed-form critical manifold point (y1, y2, y3, y4). Throws DomainError
/// when a denominator is not positive (x outside U).
Vec futile_cycle_m0(const FutileCycleParams& p, const Vec& x);

/// Reduced planar system on K0 = {x1 >= 0, x2 >= 0, x1 + x2 <= bound}.
struct ReducedFutileCycle {
  FieldFn field;
  FutileCycleParams params;
  double bound = 1.0;
  /// The order cone of the reduced dynamics: x1 decreasing, x2 increasing.
  std::vector<int> cone_signature{-1, +1};

  bool in_K0(const Vec& x, double margin = 0.0) const {
    return x[0] >= margin && x[1] >= margin && x[0] + x[1] <= bound - margin;
  }
};

ReducedFutileCycle reduced_futile_cycle(const FutileCycleParams& p);

struct DerivedConstants {
  double Km1, Km2, Km3, Km4;
  double sigma0, sigma;
  double mu;       ///< min over the K grid of -max Re eig B(x)
  double eps0;
  int mu_grid = 50;
};

DerivedConstants derived_constants(const FutileCycleParams& p, int mu_grid = 50);

struct HurwitzBlocks {
  Mat B1, B2;
  bool hurwitz = false;
  double neg_trace1, det1, neg_trace2, det2;
  std::vector<std::complex<double>> eigenvalues;
};

/// The two 2x2 diagonal blocks of D_y g0(x, m0(x), 0) with the
/// trace/determinant criterion and the full spectrum.
HurwitzBlocks hurwitz_blocks(const FutileCycleParams& p, const Vec& x);

/// Grid over the sigma/2-inflated simplex K (n x n lattice on its bounding
/// box, filtered to K). K sits strictly inside U, which carries margin sigma.
std::vector<Vec> grid_over_K(const FutileCycleParams& p, int n);

struct AlternativeScaling {
  double eps_prime;
  double A;
  ScaledFutileCycle scaled;
};

/// The rescaling by A = S_tot + Km1 + Km2 + Km3 + Km4, which shrinks the
/// singular parameter to eps' = E_tot/A.
AlternativeScaling alternative_scaling(const FutileCycleParams& p);

} // namespace slowfast::models

#endif
