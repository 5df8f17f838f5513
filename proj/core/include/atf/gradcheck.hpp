#pragma once
// Seeded gradient-vs-finite-difference suite on enumerable toy models.
//
// For each toy the closed-form per-frame gradient formulas are evaluated
// with exact oracle marginals substituted for the mean-field belief, and
// every table entry is compared against a central finite difference of the
// exact marginal log-likelihood.
//
// The formulas are exact-likelihood gradients only where the factorized
// belief matches the true joint over the variables each formula touches:
//   semantic    exact for any couplings (only singleton marginals appear)
//   intent tie  exact where the intent tables vanish (the model-side term
//               is a product of an object and an intent marginal)
//   affinity    exact where both the affinity and intent tables vanish
//               (the model-side term is a product of two object marginals)
// Each family is therefore checked on a toy zeroed accordingly; the
// couplings not under test stay random wherever exactness allows.

#include <cstdint>
#include <string>
#include <vector>

#include "atf/oracle.hpp"

namespace atf {

struct GradcheckOptions {
  int models = 20;           // toys per family
  std::uint64_t seed = 99;
  double eps = 1e-5;         // central-difference step
  double tol = 1e-5;         // max allowed relative error
  double rel_floor = 1e-3;   // |fd| floor in the relative-error denominator
  EnumerationBudget budget;
};

struct GradcheckFamilyResult {
  std::string family;  // "semantic", "intent_tie", "affinity"
  double worst_rel = 0.0;
  int entries_checked = 0;
  int worst_model = -1;  // toy index of the worst entry
};

struct GradcheckReport {
  std::vector<GradcheckFamilyResult> families;
  double tol = 0.0;
  bool pass = false;
};

// |analytic - fd| / max(|fd|, floor); the floor keeps genuinely tiny
// gradient entries from turning rounding noise into huge ratios.
double gradcheck_relative_error(double analytic, double fd, double floor);

GradcheckReport run_gradcheck(const GradcheckOptions& opts = {});

}  // namespace atf
