#pragma once

#include <span>
#include <string>

#include "upbwit/gilbert.hpp"

namespace upbwit {

// Squared-distance limits at or below this are within solver precision.
inline constexpr double kEntanglementThreshold = 1e-5;

enum class Classification { Entangled, Inconclusive };
std::string to_string(Classification c);

struct DecayFit {
  double a = 0.0;  // estimated limit of the squared distance
  double b = 1.0;  // stretch exponent, diagnostic only
  double r = 0.0;  // Pearson correlation at (a, b)
  Classification classification = Classification::Inconclusive;
  int points_used = 0;

  double sqrt_a() const;
};

struct DecayFitOptions {
  int grid_a = 200;
  int grid_b = 50;
  double b_min = 0.1;
  double b_max = 5.0;
  double a_fraction = 0.999;       // a is searched in [0, a_fraction * min D^2]
  double transient_fraction = 0.1; // leading share of the trace left out
  double a_resolution = 1e-10;
  int refine_rounds = 4;
};

/// Fits a correction-count trace to the model in which |log(D^2 - a)|^b is
/// linear in the correction index, choosing (a, b) to maximize |r|.
/// Requires at least 10 points and a non-increasing trace.
DecayFit fit_decay(const GilbertTrace& trace, const DecayFitOptions& opts = {});

// Pearson |r| between x and |log(y - a)|^b; NaN when any y <= a.
double decay_correlation(std::span<const double> x, std::span<const double> y, double a,
                         double b);

// Entangled iff a > 1e-5; never claims separability.
Classification classify(const DecayFit& fit);
Classification classify(double a);

}  // namespace upbwit
