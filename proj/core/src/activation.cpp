#include "landscape/activation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "landscape/errors.hpp"

namespace landscape {

namespace {

double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

ActValue act_eval(ActivationKind kind, double t) {
  switch (kind) {
    case ActivationKind::Sigmoid: {
      const double s = sigmoid(t);
      const double d1 = s * (1.0 - s);
      return {s, d1, d1 * (1.0 - 2.0 * s)};
    }
    case ActivationKind::Tanh: {
      const double th = std::tanh(t);
      const double d1 = 1.0 - th * th;
      return {th, d1, -2.0 * th * d1};
    }
  }
  return {0.0, 0.0, 0.0};
}

double act_value(ActivationKind kind, double t) {
  return kind == ActivationKind::Sigmoid ? sigmoid(t) : std::tanh(t);
}

ImageInterval act_image(ActivationKind kind) {
  return kind == ActivationKind::Sigmoid ? ImageInterval{0.0, 1.0} : ImageInterval{-1.0, 1.0};
}

double act_inverse(ActivationKind kind, double a) {
  const ImageInterval image = act_image(kind);
  if (!std::isfinite(a) || a < image.lower || a > image.upper) {
    throw DomainError("act_inverse: value " + std::to_string(a) + " outside activation image");
  }
  const double x = std::clamp(a, image.lower + kActInverseMargin, image.upper - kActInverseMargin);
  if (kind == ActivationKind::Sigmoid) {
    return std::log(x) - std::log1p(-x);
  }
  return std::atanh(x);
}

std::string_view to_string(ActivationKind kind) {
  return kind == ActivationKind::Sigmoid ? "sigmoid" : "tanh";
}

ActivationKind activation_from_string(std::string_view name) {
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  if (name == "tanh") return ActivationKind::Tanh;
  throw FormatError("unknown activation '" + std::string(name) + "'");
}

}  // namespace landscape
