#pragma once

#include <string_view>

namespace landscape {

/// Bounded, strictly increasing, analytic activations.
enum class ActivationKind { Sigmoid, Tanh };

struct ActValue {
  double value;
  double d1;  ///< first derivative
  double d2;  ///< second derivative
};

/// Open image interval (lower, upper) of the activation.
struct ImageInterval {
  double lower;
  double upper;
};

/// Margin kept from the image boundary before inverting.
inline constexpr double kActInverseMargin = 1e-12;

ActValue act_eval(ActivationKind kind, double t);
double act_value(ActivationKind kind, double t);
ImageInterval act_image(ActivationKind kind);

/// Inverse activation. Inputs within kActInverseMargin outside the clamped
/// window [lower + margin, upper - margin] are clamped into it; anything
/// further out raises DomainError.
double act_inverse(ActivationKind kind, double a);

std::string_view to_string(ActivationKind kind);
ActivationKind activation_from_string(std::string_view name);

}  // namespace landscape
