#include "weaklink/flux.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "weaklink/constants.hpp"
#include "weaklink/error.hpp"

namespace weaklink::flux {
namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

FluxGeometry period(double width, double length, double lambda) {
  if (!(width > 0.0) || !(length > 0.0) || !(lambda >= 0.0) || !std::isfinite(width) ||
      !std::isfinite(length) || !std::isfinite(lambda)) {
    throw DomainError(fmt::format(
        "flux period: need w > 0, l > 0, lambda >= 0 (got {}, {}, {})", width, length, lambda));
  }
  FluxGeometry g;
  g.width = width;
  g.length = length;
  g.lambda = lambda;
  g.area = (length + 2.0 * lambda) * width;
  g.b0 = kConstants.phi0 / g.area;
  return g;
}

std::string profile_name(const CurrentProfile& profile) {
  return std::visit(Overloaded{[](const Uniform&) { return std::string("uniform"); },
                               [](const EdgePair&) { return std::string("edge_pair"); },
                               [](const Sampled&) { return std::string("sampled"); }},
                    profile);
}

void validate(const CurrentProfile& profile, const FluxGeometry& geom) {
  std::visit(Overloaded{
                 [](const Uniform&) {},
                 [](const EdgePair& e) {
                   if (!(e.left_weight >= 0.0 && e.left_weight <= 1.0)) {
                     throw DomainError("edge_pair profile: left_weight must lie in [0, 1]");
                   }
                 },
                 [&](const Sampled& s) {
                   if (s.position.size() != s.weight.size() || s.position.empty()) {
                     throw DomainError("sampled profile: need equal, non-empty position and "
                                       "weight columns");
                   }
                   double total = 0.0;
                   const double half = 0.5 * geom.width * (1.0 + 1e-12);
                   for (std::size_t i = 0; i < s.weight.size(); ++i) {
                     if (!(s.weight[i] >= 0.0) || !std::isfinite(s.weight[i])) {
                       throw DomainError(fmt::format("sampled profile: weight {} is negative", i));
                     }
                     if (!(std::abs(s.position[i]) <= half)) {
                       throw DomainError(fmt::format(
                           "sampled profile: position {} = {} m lies outside [-w/2, w/2]", i,
                           s.position[i]));
                     }
                     total += s.weight[i];
                   }
                   if (!(total > 0.0)) throw DomainError("sampled profile: weights sum to zero");
                 }},
             profile);
}

double ic_of_field(const CurrentProfile& profile, const FluxGeometry& geom, double ic0,
                   double field) {
  // Phase per unit x/w; phi = pi B/B0 is half of it.
  const double k = 2.0 * kPi * field / geom.b0;
  const double amplitude = std::visit(
      Overloaded{
          [&](const Uniform&) {
            const double x = 0.5 * k;
            return x == 0.0 ? 1.0 : std::abs(std::sin(x) / x);
          },
          [&](const EdgePair& e) {
            const std::complex<double> s = e.left_weight * std::polar(1.0, -0.5 * k) +
                                           (1.0 - e.left_weight) * std::polar(1.0, 0.5 * k);
            return std::abs(s);
          },
          [&](const Sampled& s) {
            std::complex<double> sum{0.0, 0.0};
            double total = 0.0;
            for (std::size_t i = 0; i < s.weight.size(); ++i) {
              sum += s.weight[i] * std::polar(1.0, k * s.position[i] / geom.width);
              total += s.weight[i];
            }
            return std::abs(sum) / total;
          }},
      profile);
  return ic0 * amplitude;
}

std::vector<PatternPoint> ic_of_field(const CurrentProfile& profile, const FluxGeometry& geom,
                                      double ic0, std::span<const double> fields) {
  validate(profile, geom);
  std::vector<PatternPoint> out;
  out.reserve(fields.size());
  for (double b : fields) {
    if (!std::isfinite(b)) throw DomainError("ic_of_field: non-finite field value");
    out.push_back({b, ic_of_field(profile, geom, ic0, b)});
  }
  return out;
}

}  // namespace weaklink::flux
