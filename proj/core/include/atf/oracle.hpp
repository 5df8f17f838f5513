#pragma once
// Exact reference computations by explicit enumeration of the joint state
// space (support^T x n_intent).  Everything here is deliberately simple and
// independent of the mean-field code paths: it exists to check them.
//
// All enumeration entry points refuse to run past a state budget; the
// BudgetError carries the offending state count.

#include <vector>

#include "atf/marginals.hpp"
#include "atf/potentials.hpp"

namespace atf {

struct EnumerationBudget {
  double max_states = 2000000.0;  // support^T * n_intent
};

// Number of joint states support^T * n_intent (as a double; may be huge).
double joint_state_count(const VideoModel& model);

// log Z over all joint assignments.
double partition_function(const VideoModel& model,
                          const EnumerationBudget& budget = {});

struct ExactMarginals {
  MarginalState marginals;
  double log_partition = 0.0;
};

// Exact per-frame and intent marginals of the field.
ExactMarginals exact_marginals(const VideoModel& model,
                               const EnumerationBudget& budget = {});

// Exact pairwise object marginal P(object_i = a, object_j = b), i != j.
Table2D exact_object_pair_marginal(const VideoModel& model, int i, int j,
                                   const EnumerationBudget& budget = {});

// Marginal log-likelihood of an observed frame labeling with the intent
// summed out:  log sum_I exp(joint_score(xs, I)) - log Z.
double exact_loglik(const VideoModel& model,
                    const std::vector<FrameAssignment>& xs,
                    const EnumerationBudget& budget = {});

// Central finite difference of exact_loglik with respect to one table entry
// of the model.  `entry` must point into the model's own storage (a mu,
// semantic or intent table cell); it is perturbed and restored.
double finite_diff_grad(VideoModel& model, double* entry,
                        const std::vector<FrameAssignment>& xs, double eps,
                        const EnumerationBudget& budget = {});

// Mean-field evidence lower bound  E_Q[joint_score] + H(Q), closed form
// under the factorized state.  No enumeration involved.
double elbo(const VideoModel& model, const MarginalState& state);

// KL(Q || P) by direct enumeration; equals log Z - elbo up to roundoff.
double exact_kl(const VideoModel& model, const MarginalState& state,
                const EnumerationBudget& budget = {});

}  // namespace atf
