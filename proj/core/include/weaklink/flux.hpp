#pragma once

// Critical-current interference patterns I_c(B) from a supercurrent density
// profile across the link width, and the geometric modulation period.

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace weaklink::flux {

struct FluxGeometry {
  double width = 0.0;   // w, m
  double length = 0.0;  // l, m
  double lambda = 0.0;  // penetration depth, m
  double area = 0.0;    // (l + 2 lambda) w, m^2
  double b0 = 0.0;      // Phi0 / area, T
};

/// Throws DomainError unless w, l > 0 and lambda >= 0.
FluxGeometry period(double width, double length, double lambda);

struct Uniform {};

/// Two delta-function channels at the link edges x = -w/2 and +w/2.
struct EdgePair {
  double left_weight = 0.5;  // right edge carries 1 - left_weight
};

/// Discrete channels; positions in [-w/2, w/2], weights renormalized to 1.
struct Sampled {
  std::vector<double> position;  // m
  std::vector<double> weight;
};

using CurrentProfile = std::variant<Uniform, EdgePair, Sampled>;

std::string profile_name(const CurrentProfile& profile);

/// Checks weight sign and normalizability, and sampled positions against w.
void validate(const CurrentProfile& profile, const FluxGeometry& geom);

struct PatternPoint {
  double field = 0.0;  // T
  double ic = 0.0;     // A
};

/// I_c(B) = I_c0 |sum_x j(x) exp(2 pi i (B/B0)(x/w))|.
double ic_of_field(const CurrentProfile& profile, const FluxGeometry& geom, double ic0,
                   double field);

std::vector<PatternPoint> ic_of_field(const CurrentProfile& profile, const FluxGeometry& geom,
                                      double ic0, std::span<const double> fields);

}  // namespace weaklink::flux
