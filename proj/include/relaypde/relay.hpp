#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relaypde {

/// Branch index of a non-ideal relay.
enum class Config : std::uint8_t { one = 1, two = 2 };

inline int to_int(Config c) { return static_cast<int>(c); }

inline Config config_from_int(int value) {
  if (value == 1) return Config::one;
  if (value == 2) return Config::two;
  throw std::invalid_argument("configuration value must be 1 or 2, got " + std::to_string(value));
}

struct Thresholds {
  double alpha;
  double beta;

  Thresholds(double a, double b) : alpha(a), beta(b) {
    if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b)) {
      throw std::invalid_argument("thresholds: alpha must be finite and strictly below beta");
    }
  }
};

using BranchFn = std::function<double(double)>;

/// The two branches of the relay. h1 is meaningful on (-inf, beta], h2 on
/// [alpha, inf); evaluation clamps the argument into the native domain.
struct RelayBranches {
  Thresholds thresholds;
  BranchFn h1;
  BranchFn h2;
  std::optional<double> sigma;  // Hölder exponent metadata, (0, 1]
};

inline double evaluate_branch(const RelayBranches& branches, Config which, double u) {
  if (which == Config::one) return branches.h1(std::min(u, branches.thresholds.beta));
  return branches.h2(std::max(u, branches.thresholds.alpha));
}

inline Config init_configuration(Config zeta0, double g0, const Thresholds& thr) {
  if (g0 <= thr.alpha) return Config::one;
  if (g0 >= thr.beta) return Config::two;
  return zeta0;
}

struct RelayState {
  Config config = Config::one;
  double last_input = 0.0;
  double last_time = 0.0;
  // last sample sits on a threshold that has already been reported
  bool on_threshold_run = false;
};

inline RelayState make_relay_state(Config zeta0, double t0, double g0, const Thresholds& thr) {
  return RelayState{init_configuration(zeta0, g0, thr), g0, t0, g0 == thr.alpha || g0 == thr.beta};
}

struct CrossingEvent {
  double time;
  double level;  // alpha or beta
  Config config;  // configuration dictated by the attained threshold
};

namespace detail {

inline bool attains(double g0, double g1, double level) {
  // g0 itself belongs to the previous segment
  return (g0 < level && g1 >= level) || (g0 > level && g1 <= level);
}

inline double crossing_time(double t0, double g0, double t1, double g1, double level) {
  if (g1 == level) return t1;
  return t0 + (level - g0) / (g1 - g0) * (t1 - t0);
}

template <typename Sink>
void advance_core(RelayState& state, double t_next, double g_next, const Thresholds& thr, Sink&& sink) {
  if (!(t_next > state.last_time)) {
    throw std::invalid_argument("advance_relay: t_next must exceed the last sample time");
  }
  const double t0 = state.last_time;
  const double g0 = state.last_input;
  const double g1 = g_next;

  if (g0 == g1) {
    const bool on_alpha = g0 == thr.alpha;
    const bool on_beta = g0 == thr.beta;
    if (on_alpha || on_beta) {
      const Config dictated = on_alpha ? Config::one : Config::two;
      if (!state.on_threshold_run) sink(CrossingEvent{t0, g0, dictated});
      state.config = dictated;
      state.on_threshold_run = true;
    } else {
      state.on_threshold_run = false;
    }
  } else {
    state.on_threshold_run = g1 == thr.alpha || g1 == thr.beta;
    // a linear segment is monotone, so the traversal order of the levels is known
    const double first = g1 > g0 ? thr.alpha : thr.beta;
    const double second = g1 > g0 ? thr.beta : thr.alpha;
    for (double level : {first, second}) {
      if (attains(g0, g1, level)) {
        const Config dictated = level == thr.alpha ? Config::one : Config::two;
        sink(CrossingEvent{crossing_time(t0, g0, t_next, g1, level), level, dictated});
        state.config = dictated;
      }
    }
  }
  state.last_time = t_next;
  state.last_input = g1;
}

}  // namespace detail

inline std::pair<RelayState, std::vector<CrossingEvent>> advance_relay(const RelayState& state, double t_next,
                                                                        double g_next, const Thresholds& thr) {
  RelayState next = state;
  std::vector<CrossingEvent> events;
  detail::advance_core(next, t_next, g_next, thr, [&](const CrossingEvent& e) { events.push_back(e); });
  return {next, std::move(events)};
}

/// In-place advance without event collection; returns true if the configuration changed.
inline bool step_relay(RelayState& state, double t_next, double g_next, const Thresholds& thr) {
  const Config before = state.config;
  detail::advance_core(state, t_next, g_next, thr, [](const CrossingEvent&) {});
  return state.config != before;
}

/// Piecewise-linear input sampled at strictly increasing times.
struct SampledInput {
  std::vector<double> times;
  std::vector<double> values;

  void validate() const {
    if (times.size() != values.size()) throw std::invalid_argument("SampledInput: times and values differ in length");
    if (times.size() < 2) throw std::invalid_argument("SampledInput: at least two samples are required");
    for (std::size_t k = 1; k < times.size(); ++k) {
      if (!(times[k] > times[k - 1])) throw std::invalid_argument("SampledInput: times must be strictly increasing");
    }
  }
};

struct RelayTrajectory {
  std::vector<Config> configs;
  std::vector<double> outputs;
  RelayState final_state;
};

inline RelayTrajectory relay_trajectory(Config zeta0, const SampledInput& input, const RelayBranches& branches) {
  input.validate();
  const auto& thr = branches.thresholds;
  RelayTrajectory out;
  out.configs.reserve(input.times.size());
  out.outputs.reserve(input.times.size());
  RelayState state = make_relay_state(zeta0, input.times.front(), input.values.front(), thr);
  out.configs.push_back(state.config);
  out.outputs.push_back(evaluate_branch(branches, state.config, input.values.front()));
  for (std::size_t k = 1; k < input.times.size(); ++k) {
    step_relay(state, input.times[k], input.values[k], thr);
    out.configs.push_back(state.config);
    out.outputs.push_back(evaluate_branch(branches, state.config, input.values[k]));
  }
  out.final_state = state;
  return out;
}

/// Continues a trajectory from a stored state over further samples (times after state.last_time).
inline RelayTrajectory resume_trajectory(const RelayState& start, std::span<const double> times,
                                         std::span<const double> values, const RelayBranches& branches) {
  if (times.size() != values.size()) throw std::invalid_argument("resume_trajectory: length mismatch");
  RelayTrajectory out;
  RelayState state = start;
  for (std::size_t k = 0; k < times.size(); ++k) {
    step_relay(state, times[k], values[k], branches.thresholds);
    out.configs.push_back(state.config);
    out.outputs.push_back(evaluate_branch(branches, state.config, values[k]));
  }
  out.final_state = state;
  return out;
}

struct UniquenessProbe {
  bool bounded = true;
  double m_estimate = 0.0;
  // band maximum nearest the threshold over the one three decades further out
  double growth = 0.0;
  std::string detail;
};

/// Empirical estimate of the constant in the singular Lipschitz bound
///   |H1(u)-H1(v)| <= M |u-v| / ((beta-u)^sigma + (beta-v)^sigma)
/// (and its mirror for H2 near alpha). Sample points accumulate geometrically
/// at the threshold; growth of the band maxima toward the threshold is
/// reported as unbounded.
inline UniquenessProbe uniqueness_condition_probe(const RelayBranches& branches, double U, double sigma,
                                                  int sample_count) {
  const auto& thr = branches.thresholds;
  if (!(sigma >= 0.0 && sigma < 1.0)) throw std::invalid_argument("probe: sigma must lie in [0, 1)");
  if (!(U > std::max(std::abs(thr.alpha), std::abs(thr.beta)))) {
    throw std::invalid_argument("probe: U must exceed max(|alpha|, |beta|)");
  }
  if (sample_count < 8) throw std::invalid_argument("probe: sample_count must be at least 8");

  constexpr int decades = 12;
  UniquenessProbe result;
  std::vector<double> band_max(decades, 0.0);

  auto scan = [&](const BranchFn& h, double span, auto&& to_point, double threshold) {
    std::vector<double> dist(sample_count);
    for (int i = 0; i < sample_count; ++i) {
      const double s = static_cast<double>(i) / (sample_count - 1);
      dist[i] = span * std::pow(10.0, -decades * s);
    }
    for (int i = 0; i < sample_count; ++i) {
      for (int j = i + 1; j < sample_count; ++j) {
        const double u = to_point(dist[i]);
        const double w = to_point(dist[j]);
        const double du = std::abs(u - w);
        if (du == 0.0) continue;
        // distances recomputed from the rounded points keep the weight consistent with h
        const double weight = std::pow(std::abs(threshold - u), sigma) + std::pow(std::abs(threshold - w), sigma);
        const double ratio = std::abs(h(u) - h(w)) * weight / du;
        const double closest = std::min(dist[i], dist[j]);
        int band = static_cast<int>(std::floor(-std::log10(closest / span)));
        band = std::clamp(band, 0, decades - 1);
        band_max[band] = std::max(band_max[band], ratio);
        result.m_estimate = std::max(result.m_estimate, ratio);
      }
    }
  };

  const double span1 = thr.beta + U;
  scan(branches.h1, span1, [&](double d) { return thr.beta - d; }, thr.beta);
  const double span2 = U - thr.alpha;
  scan(branches.h2, span2, [&](double d) { return thr.alpha + d; }, thr.alpha);

  // finite branches whose ratio keeps growing across the innermost decades diverge
  const double inner = band_max[decades - 2];
  const double outer = band_max[decades - 5];
  result.growth = outer > 0.0 ? inner / outer : (inner > 0.0 ? INFINITY : 1.0);
  if (result.growth > 10.0) {
    result.bounded = false;
    result.detail = "ratio grows toward the threshold; no finite constant for this sigma";
  }
  return result;
}

}  // namespace relaypde
