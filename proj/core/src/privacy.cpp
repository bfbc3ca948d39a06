#include "dpnash/privacy.hpp"

#include <cmath>
#include <string>

#include "dpnash/philox.hpp"

namespace dpnash {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

void check_budget_domain(double c, double q, double q_bar, double gradient_bound) {
  require(c > 0.0, "stepsize scale c must be positive");
  require(q > 0.0 && q < 1.0, "stepsize decay q must lie in (0, 1)");
  require(q_bar > 0.0 && q_bar < 1.0, "noise decay q_bar must lie in (0, 1)");
  require(q_bar > q,
          "q_bar must exceed q: the budget 2cCq_bar/(d(q_bar - q)) requires "
          "q < q_bar < 1");
  require(gradient_bound > 0.0, "gradient bound C must be positive");
}

}  // namespace

void NoiseParams::validate() const {
  require(std::isfinite(d) && d >= 0.0, "noise scale d must be >= 0");
  require(q_bar > 0.0 && q_bar < 1.0, "noise decay q_bar must lie in (0, 1)");
}

NoiseStream::NoiseStream(NoiseParams params, std::uint64_t seed, std::uint64_t replica)
    : params_(params), seed_(seed), replica_(replica) {
  params_.validate();
}

double NoiseStream::scale_at(long iteration) const {
  require(iteration >= 0, "iteration must be nonnegative");
  return params_.d * std::pow(params_.q_bar, static_cast<double>(iteration));
}

double NoiseStream::unit_draw(int player, long iteration) const {
  require(player >= 0, "player index must be nonnegative");
  require(iteration >= 0, "iteration must be nonnegative");
  const PhiloxCounter ctr{static_cast<std::uint32_t>(iteration),
                          static_cast<std::uint32_t>(player),
                          static_cast<std::uint32_t>(replica_),
                          static_cast<std::uint32_t>(replica_ >> 32)};
  const PhiloxKey key{static_cast<std::uint32_t>(seed_),
                      static_cast<std::uint32_t>(seed_ >> 32)};
  const auto words = philox4x32_10(ctr, key);
  const double v = uniform_open01(words[0], words[1]) - 0.5;
  const double sign = v > 0.0 ? 1.0 : -1.0;
  return -sign * std::log1p(-2.0 * std::abs(v));
}

double NoiseStream::draw(int player, long iteration) const {
  return scale_at(iteration) * unit_draw(player, iteration);
}

double epsilon_of(double c, double q, double d, double q_bar, double gradient_bound) {
  check_budget_domain(c, q, q_bar, gradient_bound);
  require(d > 0.0, "noise scale d must be positive: the budget diverges at d = 0");
  return 2.0 * c * gradient_bound * q_bar / (d * (q_bar - q));
}

double scale_for_epsilon(double c, double q, double q_bar, double gradient_bound,
                         double target_epsilon) {
  check_budget_domain(c, q, q_bar, gradient_bound);
  require(target_epsilon > 0.0, "target budget must be positive");
  return 2.0 * c * gradient_bound * q_bar / (target_epsilon * (q_bar - q));
}

}  // namespace dpnash
