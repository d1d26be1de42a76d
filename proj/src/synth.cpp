#include "irradcast/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "irradcast/error.hpp"

namespace irradcast {
namespace {

struct Regime {
  double mean;
  double sigma;  // stationary standard deviation of the cloud factor
};

constexpr std::array<Regime, 3> kRegimes{{{0.78, 0.04}, {0.55, 0.20}, {0.25, 0.08}}};
// Row-stochastic day-to-day transitions; weather tends to persist.
constexpr double kTransition[3][3] = {{0.6, 0.3, 0.1}, {0.3, 0.4, 0.3}, {0.15, 0.35, 0.5}};
constexpr double kRelaxationMinutes = 120.0;

}  // namespace

SynthOutput synthesize(const SynthSpec& spec) {
  spec.location.validate();
  if (spec.days < 8) throw RangeError("synthetic data needs at least 8 days");
  if (spec.step.count() <= 0 || 86400 % spec.step.count() != 0)
    throw RangeError("synthetic step must divide one day");

  const Eigen::Index per_day = 86400 / spec.step.count();
  const Eigen::Index n = per_day * spec.days;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double rho = std::exp(-double(spec.step.count()) / 60.0 / kRelaxationMinutes);
  const double innovation = std::sqrt(1.0 - rho * rho);

  Eigen::VectorXd values(n), cloud(n);
  int regime = 0;
  double c = kRegimes[0].mean;
  for (int day = 0; day < spec.days; ++day) {
    if (day > 0) {
      const double u = uniform(rng);
      double acc = 0.0;
      int next = 2;
      for (int r = 0; r < 3; ++r) {
        acc += kTransition[regime][r];
        if (u < acc) {
          next = r;
          break;
        }
      }
      regime = next;
    }
    const Regime& reg = kRegimes[std::size_t(regime)];
    for (Eigen::Index k = 0; k < per_day; ++k) {
      const Eigen::Index i = day * per_day + k;
      c = reg.mean + (c - reg.mean) * rho + reg.sigma * innovation * normal(rng);
      c = std::clamp(c, 0.0, kMaxCloudFactor);
      const Instant mid = spec.start + spec.step * i + spec.step / 2;
      cloud[i] = c;
      values[i] = std::min(extraterrestrial_irradiance(spec.location, mid) * c, kMaxIrradiance);
    }
  }
  return {make_series(spec.start, spec.step, std::move(values), spec.location), std::move(cloud)};
}

}  // namespace irradcast
