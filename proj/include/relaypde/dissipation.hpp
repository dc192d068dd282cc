#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "relaypde/errors.hpp"
#include "relaypde/heat.hpp"
#include "relaypde/relay.hpp"

namespace relaypde {

enum class BoxKind { strict, generalized };

struct DissipationBox {
  double U = 0.0;
  BoxKind kind = BoxKind::strict;
  double mu = 0.0;
};

struct BoxScanOptions {
  double growth = 1.1;
  double cap = 1e6;
  int samples = 401;
};

/// Sign test at +-U against both branches sampled on |u| <= U.
inline bool box_holds(const ReactionTerm& reaction, const RelayBranches& branches, double U, int samples) {
  for (int s = 0; s < samples; ++s) {
    const double u = -U + 2.0 * U * s / (samples - 1);
    for (Config c : {Config::one, Config::two}) {
      const double v = evaluate_branch(branches, c, u);
      if (!(reaction(U, v) < 0.0) || !(reaction(-U, v) > 0.0)) return false;
    }
  }
  return true;
}

/// First U on a geometric scan above max(hint, 1e-3) passing the sign test.
inline DissipationBox invariant_rectangle_bound(const ReactionTerm& reaction, const RelayBranches& branches,
                                                double u_range_hint, const BoxScanOptions& opts = {}) {
  double U = std::max(std::abs(u_range_hint), 1e-3) * 1.01;
  while (U <= opts.cap) {
    if (box_holds(reaction, branches, U, opts.samples)) return {U, BoxKind::strict, 0.0};
    U *= opts.growth;
  }
  throw NoBoxFound("invariant_rectangle_bound: sign condition fails up to U=" + std::to_string(opts.cap));
}

/// f(u, v) - mu h(u)
inline ReactionTerm regularized_reaction(const ReactionTerm& base, std::function<double(double)> h_term,
                                         std::function<double(double)> h_prime, double mu) {
  ReactionTerm out;
  out.f = [base, h_term, mu](double u, double v) { return base(u, v) - mu * h_term(u); };
  out.df_du = [base, h_prime, mu](double u, double v) { return base.du(u, v) - mu * h_prime(u); };
  if (base.lipschitz) out.lipschitz = *base.lipschitz;
  return out;
}

inline DissipationBox invariant_rectangle_bound_generalized(const ReactionTerm& base, const RelayBranches& branches,
                                                            std::function<double(double)> h_term, double mu,
                                                            double u_range_hint, const BoxScanOptions& opts = {}) {
  const ReactionTerm f_mu = regularized_reaction(base, h_term, [](double) { return 0.0; }, mu);
  DissipationBox box = invariant_rectangle_bound(f_mu, branches, u_range_hint, opts);
  box.kind = BoxKind::generalized;
  box.mu = mu;
  return box;
}

}  // namespace relaypde
