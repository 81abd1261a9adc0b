#include "landscape/infinity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "landscape/errors.hpp"

namespace landscape {

ConstantFit constant_fit(const Dataset& data) {
  const Vector& y = data.targets();
  ConstantFit fit;
  fit.c = y.mean();
  fit.loss = (y.array() - fit.c).square().sum();
  return fit;
}

double saturation_rate(ActivationKind kind) { return kind == ActivationKind::Tanh ? 2.0 : 1.0; }

double phi(const Matrix& a, const Vector& d, const Vector& u, double rate) {
  const Vector e = (-rate * (u.transpose() * a)).transpose();
  return d.dot(e.array().exp().matrix());
}

SignProbe sign_probe_vectors(const ForwardCache& cache, const Dataset& data) {
  const std::size_t L = cache.act.size() - 1;
  if (L < 2) throw ShapeError("sign_probe_vectors: need at least one hidden layer");
  const Matrix& a = cache.act[L - 2];
  const Vector d = (constant_fit(data).c - data.targets().array()).matrix();
  const double rate = 1.0;

  int best = -1;
  double best_val = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double s = d.dot(a.row(r).transpose());
    const double tol = 1e-8 * d.norm() * a.row(r).norm();
    if (std::abs(s) > tol && std::abs(s) > best_val) {
      best_val = std::abs(s);
      best = static_cast<int>(r);
    }
  }
  if (best < 0) throw DegenerateData("targets are uncorrelated with every feature of the layer below");

  SignProbe probe;
  probe.coordinate = best;
  const double sgn = d.dot(a.row(best).transpose()) > 0 ? 1.0 : -1.0;
  std::vector<double> ts;
  for (int k = 0; k <= 10; ++k) ts.push_back(std::ldexp(1.0, k));
  for (int k = 1; k <= 30; ++k) ts.push_back(std::ldexp(1.0, -k));
  for (double t : ts) {
    // phi(t e_r) ~ -t sum d a^r for small t.
    Vector up = Vector::Zero(a.rows());
    up[best] = -sgn * t;
    const Vector un = -up;
    const double pp = phi(a, d, up, rate);
    const double pn = phi(a, d, un, rate);
    if (pp > 0.0 && pn < 0.0) {
      probe.magnitude = t;
      probe.u_pos = up;
      probe.u_neg = un;
      probe.phi_pos = pp;
      probe.phi_neg = pn;
      return probe;
    }
  }
  throw DegenerateData("no probe magnitude separates the signs of phi");
}

namespace {

// d - sigma(t) for the upper limit d = 1, accurate for large t.
double upper_gap(ActivationKind kind, double t) {
  if (kind == ActivationKind::Tanh) return 2.0 / (1.0 + std::exp(2.0 * t));
  return t >= 0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t));
}

}  // namespace

InfinityFamily build_infinity_family(const Network& base, const Dataset& data, bool flipped) {
  const int L = base.num_layers();
  if (base.dim(L - 1) < 2) throw ShapeError("last hidden layer needs at least two neurons");
  InfinityFamily fam;
  fam.flipped = flipped;
  fam.fit = constant_fit(data);
  const ForwardCache cache = forward(base, data);
  fam.probe = sign_probe_vectors(cache, data);
  const double rate = saturation_rate(base.activation());

  fam.network = base;
  Matrix& u = fam.network.weight(L - 1);
  u.row(fam.row_pos) = fam.probe.u_pos.transpose() / rate;
  u.row(fam.row_neg) = fam.probe.u_neg.transpose() / rate;

  const Matrix& a = cache.act[static_cast<std::size_t>(L - 2)];
  const Vector d = (fam.fit.c - data.targets().array()).matrix();
  const int n = base.dim(L - 1);
  fam.phis.resize(n);
  for (int i = 0; i < n; ++i) fam.phis[i] = phi(a, d, u.row(i).transpose(), rate);
  if (!(fam.phis[fam.row_pos] > 0.0 && fam.phis[fam.row_neg] < 0.0)) {
    throw InfeasibleSigns("designated rows do not carry opposite phi signs");
  }

  // Output weights of sign opposite to phi (or equal, for the control).
  const double s = flipped ? -1.0 : 1.0;
  fam.v.resize(n);
  double others = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == fam.row_pos || i == fam.row_neg) continue;
    fam.v[i] = s * (fam.phis[i] >= 0.0 ? -1.0 : 1.0);
    others += fam.v[i];
  }
  const double rest = fam.fit.c - others;
  if (!flipped) {
    fam.v[fam.row_neg] = std::max(rest, 0.0) + 1.0;
    fam.v[fam.row_pos] = std::min(rest, 0.0) - 1.0;
  } else {
    fam.v[fam.row_pos] = std::max(rest, 0.0) + 1.0;
    fam.v[fam.row_neg] = std::min(rest, 0.0) - 1.0;
  }
  fam.network.weight(L) = fam.v.transpose();
  fam.network.bias(L).setZero();
  return fam;
}

Network InfinityFamily::at(double p) const { return at(p, v); }

Network InfinityFamily::at(double p, const Vector& v_out) const {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  Network net = network;
  const int L = net.num_layers();
  net.bias(L - 1).setConstant(-std::log(p));
  net.weight(L) = v_out.transpose();
  net.bias(L).setZero();
  return net;
}

double loss_excess(const InfinityFamily& family, const Dataset& data, double p, const Vector& v_out) {
  const Network net = family.at(p, v_out);
  const int L = net.num_layers();
  const ForwardCache cache = forward(net, data);
  const Matrix& pre = cache.pre[static_cast<std::size_t>(L - 1)];
  const double c = family.fit.c;
  const double sum_gap = v_out.sum() - c;
  double excess = 0.0;
  for (Eigen::Index alpha = 0; alpha < pre.cols(); ++alpha) {
    double fc = sum_gap;
    for (Eigen::Index i = 0; i < pre.rows(); ++i) fc -= v_out[i] * upper_gap(net.activation(), pre(i, alpha));
    excess += fc * (fc + 2.0 * (c - data.targets()[alpha]));
  }
  return excess;
}

std::vector<double> default_p_grid() {
  std::vector<double> g(24);
  for (int i = 0; i < 24; ++i) g[i] = std::pow(10.0, -8.0 + 6.0 * i / 23.0);
  return g;
}

InfinityReport verify_infinity_minimum(const InfinityFamily& family, const Dataset& data,
                                       const std::vector<double>& p_grid, int ball_samples, std::uint64_t seed,
                                       double ball_radius) {
  InfinityReport rep;
  rep.lc = family.fit.loss;
  rep.p_grid = p_grid;
  std::sort(rep.p_grid.begin(), rep.p_grid.end());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto n = family.v.size();
  std::vector<Vector> ball{family.v};
  for (int k = 0; k < ball_samples; ++k) {
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = normal(rng);
    g *= ball_radius * std::pow(unif(rng), 1.0 / static_cast<double>(n)) / g.norm();
    g.array() -= g.mean();  // back onto sum(v) = c
    ball.push_back(family.v + g);
  }

  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.positive_small_p = true;
  for (double p : rep.p_grid) {
    double m = std::numeric_limits<double>::infinity();
    for (const Vector& v : ball) m = std::min(m, loss_excess(family, data, p, v));
    rep.margin.push_back(m);
    rep.min_margin = std::min(rep.min_margin, m);
    if (p <= 1e-4 && !(m > 0.0)) rep.positive_small_p = false;
  }
  const std::size_t tail = std::min<std::size_t>(8, rep.margin.size());
  rep.monotone_tail = tail > 0;
  for (std::size_t k = 1; k < tail; ++k) rep.monotone_tail = rep.monotone_tail && rep.margin[k] >= rep.margin[k - 1];
  rep.pass = rep.positive_small_p && rep.monotone_tail;
  rep.limit_gap = std::abs(loss_excess(family, data, 1e-12, family.v));
  return rep;
}

}  // namespace landscape
