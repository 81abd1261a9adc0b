#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <random>
#include <vector>

#include "landscape/network.hpp"
#include "landscape/trainer.hpp"

namespace landscape::fixtures {

inline Dataset random_dataset(int input_dim, int n, std::uint64_t seed, double target_scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix x(input_dim, n);
  Vector y(n);
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < input_dim; ++i) x(i, a) = u(rng);
    y(a) = target_scale * u(rng);
  }
  return Dataset(x, y);
}

/// Random dims (n0, h1, ..., 1) with every entry in [1, cap].
inline std::vector<int> random_dims(std::mt19937_64& rng, const std::vector<int>& caps) {
  std::vector<int> dims;
  for (int cap : caps) dims.push_back(std::uniform_int_distribution<int>(1, cap)(rng));
  dims.back() = 1;
  return dims;
}

/// Teacher data and a trained 2-1-1-1 student at a critical point.
struct TrainedStudent {
  Dataset data;
  Network net;
  TrainReport report;
};

/// Memoised per process: several tests share the same students.
inline const TrainedStudent& trained_student(std::uint64_t seed, double tol_g = 1e-8) {
  static std::map<std::pair<std::uint64_t, double>, TrainedStudent> cache;
  const auto key = std::make_pair(seed, tol_g);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const Network teacher = init_random({2, 3, 3, 1}, ActivationKind::Sigmoid, 2.0, seed);
  TrainedStudent s;
  s.data = generate_teacher_dataset(teacher, 12, InputSampler{}, seed + 100);
  TrainOptions opts;
  opts.tol_g = tol_g;
  TrainResult r = train_to_critical(init_random({2, 1, 1, 1}, ActivationKind::Sigmoid, 0.5, seed), s.data, opts);
  s.net = std::move(r.net);
  s.report = std::move(r.report);
  return cache.emplace(key, std::move(s)).first->second;
}

}  // namespace landscape::fixtures
