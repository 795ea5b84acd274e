// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

namespace scengen {

namespace {

std::string format_msg(const char* fmt, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return std::string(buf);
}

}  // namespace

double Rng::normal() {
  // Box-Muller without the cached spare, so every draw consumes exactly two
  // uniforms regardless of call history.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw MomentRegionError("gamma shape must be positive");
  if (shape < 1.0) {
    // boost a feasible shape and correct with a power of a uniform
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    const double x = normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

const char* to_string(PearsonFamily family) {
  switch (family) {
    case PearsonFamily::kNormal: return "normal";
    case PearsonFamily::kTypeI: return "pearson-1";
    case PearsonFamily::kTypeIII: return "pearson-3";
    case PearsonFamily::kTypeIV: return "pearson-4";
    case PearsonFamily::kTypeV: return "pearson-5";
    case PearsonFamily::kTypeVI: return "pearson-6";
    case PearsonFamily::kTypeVII: return "pearson-7";
    case PearsonFamily::kEmpirical: return "empirical";
  }
  return "?";
}

namespace {

double interp_quantile(const std::vector<double>& sorted, double u) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = u * static_cast<double>(n - 1);
  std::size_t idx = static_cast<std::size_t>(h);
  if (idx > n - 2) idx = n - 2;
  const double frac = h - static_cast<double>(idx);
  return sorted[idx] + frac * (sorted[idx + 1] - sorted[idx]);
}

double raw_sample(const MarginalModel& m, Rng& rng) {
  switch (m.family) {
    case PearsonFamily::kNormal:
      return m.mean + m.param[0] * rng.normal();
    case PearsonFamily::kTypeI:
      return m.mean + m.param[0] +
             m.param[1] * rng.beta(m.param[2], m.param[3]);
    case PearsonFamily::kTypeIII:
      return m.mean + m.param[0] + m.param[1] * rng.gamma(m.param[2]);
    case PearsonFamily::kTypeIV: {
      // angular density cos(theta)^r * exp(-nu*theta) on (-pi/2, pi/2),
      // exact rejection from a uniform proposal peaked at the mode
      const double a = m.param[0];
      const double nu = m.param[1];
      const double r = 2.0 * m.param[2] - 2.0;
      const double mode = std::atan(-nu / r);
      const double hmax = r * std::log(std::cos(mode)) - nu * mode;
      for (;;) {
        const double theta = (rng.uniform() - 0.5) * M_PI;
        const double h = r * std::log(std::cos(theta)) - nu * theta;
        if (std::log(rng.uniform()) <= h - hmax)
          return m.param[3] + a * std::tan(theta);
      }
    }
    case PearsonFamily::kTypeV:
      return m.mean + m.param[0] + m.param[1] / rng.gamma(m.param[2]);
    case PearsonFamily::kTypeVI:
      return m.mean + m.param[0] +
             m.param[1] * rng.gamma(m.param[2]) / rng.gamma(m.param[3]);
    case PearsonFamily::kTypeVII: {
      const double nu = m.param[1];
      const double chi2 = 2.0 * rng.gamma(0.5 * nu);
      return m.mean + m.param[0] * rng.normal() / std::sqrt(chi2 / nu);
    }
    case PearsonFamily::kEmpirical:
      return interp_quantile(m.pool, rng.uniform());
  }
  throw MomentRegionError("unknown marginal family");
}

}  // namespace

double MarginalModel::sample(Rng& rng) const {
  const double v = raw_sample(*this, rng);
  return mirrored ? 2.0 * mean - v : v;
}

MarginalModel MarginalModel::empirical(std::vector<double> data) {
  if (data.empty()) throw MomentRegionError("empirical marginal needs data");
  std::sort(data.begin(), data.end());
  MarginalModel m;
  m.family = PearsonFamily::kEmpirical;
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : data) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.mean = mean;
  m.variance = m2;
  const double sd = std::sqrt(m2);
  m.skewness = m2 > 0.0 ? m3 / (sd * sd * sd) : 0.0;
  m.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 3.0;
  m.pool = std::move(data);
  return m;
}

MarginalModel fit_pearson(double mean, double variance, double skewness,
                          double kurtosis) {
  if (!std::isfinite(mean) || !std::isfinite(variance) ||
      !std::isfinite(skewness) || !std::isfinite(kurtosis))
    throw MomentRegionError("moments must be finite");
  if (!(variance > 0.0))
    throw MomentRegionError("variance must be positive");

  MarginalModel m;
  m.mean = mean;
  m.variance = variance;
  m.skewness = skewness;
  m.kurtosis = kurtosis;
  m.mirrored = skewness < 0.0;

  const double g = std::abs(skewness);
  const double b1 = g * g;
  const double b2 = kurtosis;
  const double sd = std::sqrt(variance);
  if (b2 <= b1 + 1.0 + 1e-9)
    throw MomentRegionError(format_msg(
        "kurtosis %g does not exceed the bound skewness^2 + 1 = %g", b2,
        b1 + 1.0));

  if (g < 1e-5 && std::abs(b2 - 3.0) < 1e-5) {
    m.family = PearsonFamily::kNormal;
    m.param[0] = sd;
    return m;
  }

  // quadratic from the moment recursion, scaled to avoid small denominators
  const double c0 = variance * (4.0 * b2 - 3.0 * b1);
  const double c1 = sd * g * (b2 + 3.0);
  const double c2 = 2.0 * b2 - 3.0 * b1 - 6.0;
  const double slope = 10.0 * b2 - 12.0 * b1 - 18.0;

  if (g < 1e-5 && c2 > 0.0) {
    // symmetric with heavy tails: scaled t
    const double nu = (4.0 * b2 - 6.0) / (b2 - 3.0);
    m.family = PearsonFamily::kTypeVII;
    m.param[0] = sd * std::sqrt((nu - 2.0) / nu);
    m.param[1] = nu;
    return m;
  }

  // Near the gamma line the quadratic degenerates; route a band around it
  // to the exact gamma so shapes stay bounded (the kurtosis then misses the
  // target by at most half the band width).
  if (g >= 1e-5 && std::abs(c2) < 0.02 * std::max(1.0, b2 - b1 - 1.0)) {
    const double k = 4.0 / b1;
    const double theta = sd * g / 2.0;
    m.family = PearsonFamily::kTypeIII;
    m.param[0] = -k * theta;
    m.param[1] = theta;
    m.param[2] = k;
    return m;
  }

  if (c2 < 0.0) {
    // real roots straddling the mean: bounded support, beta transform
    // (c1 >= 0 throughout since the fit uses the skewness magnitude)
    const double disc = c1 * c1 - 4.0 * c0 * c2;
    const double q = -0.5 * (c1 + std::sqrt(disc));
    double r1 = q / c2;
    double r2 = c0 / q;
    if (r1 > r2) std::swap(r1, r2);
    const double e1 = -(slope * r1 + c1) / (c2 * (r1 - r2));
    const double e2 = -(slope * r2 + c1) / (c2 * (r2 - r1));
    if (e1 <= -1.0 + 1e-12 || e2 <= -1.0 + 1e-12)
      throw MomentRegionError(format_msg(
          "bounded-family exponents %g, %g are not integrable", e1, e2));
    m.family = PearsonFamily::kTypeI;
    m.param[0] = r1;
    m.param[1] = r2 - r1;
    m.param[2] = e1 + 1.0;
    m.param[3] = e2 + 1.0;
    return m;
  }

  const double kappa = c1 * c1 / (4.0 * c0 * c2);
  if (std::abs(kappa - 1.0) < 1e-3) {
    // coincident roots: inverse gamma, shape from the skewness
    const double alpha = (3.0 * b1 + 8.0 + 4.0 * std::sqrt(b1 + 4.0)) / b1;
    if (alpha <= 4.0)
      throw MomentRegionError(
          format_msg("inverse-gamma shape %g needs to exceed 4", alpha, 0.0));
    const double c = sd * (alpha - 1.0) * std::sqrt(alpha - 2.0);
    m.family = PearsonFamily::kTypeV;
    m.param[0] = -c / (alpha - 1.0);
    m.param[1] = c;
    m.param[2] = alpha;
    return m;
  }

  if (kappa > 1.0) {
    // real roots on one side of the mean: beta prime beyond the inner root
    const double disc = c1 * c1 - 4.0 * c0 * c2;
    const double q = -0.5 * (c1 + std::sqrt(disc));
    double r1 = q / c2;
    double r2 = c0 / q;
    if (r1 > r2) std::swap(r1, r2);
    if (r2 > 0.0)
      throw MomentRegionError("unbounded-family roots have unexpected sign");
    const double e1 = -(slope * r1 + c1) / (c2 * (r1 - r2));
    const double e2 = -(slope * r2 + c1) / (c2 * (r2 - r1));
    const double p = e2 + 1.0;
    const double qq = -e1 - e2 - 1.0;
    if (p <= 0.0 || qq <= 4.0)
      throw MomentRegionError(format_msg(
          "beta-prime shapes %g, %g leave the fourth moment unbounded", p,
          qq));
    m.family = PearsonFamily::kTypeVI;
    m.param[0] = r2;
    m.param[1] = r2 - r1;
    m.param[2] = p;
    m.param[3] = qq;
    return m;
  }

  // complex roots: unbounded skewed family
  const double r = 6.0 * (b2 - b1 - 1.0) / c2;
  const double s2 = 16.0 * (r - 1.0) - b1 * (r - 2.0) * (r - 2.0);
  if (!(r > 2.0) || !(s2 > 0.0))
    throw MomentRegionError(
        format_msg("arctan-family parameters r = %g, S^2 = %g are outside "
                   "the admissible region",
                   r, s2));
  const double s = std::sqrt(s2);
  const double a = sd * s / 4.0;
  const double nu = -r * (r - 2.0) * g / s;
  m.family = PearsonFamily::kTypeIV;
  m.param[0] = a;
  m.param[1] = nu;
  m.param[2] = (r + 2.0) / 2.0;
  m.param[3] = mean + a * nu / r;
  return m;
}

namespace {

// lower-triangular factor with a semidefinite pivot tolerance; returns false
// when a pivot goes genuinely negative
bool cholesky(const std::vector<std::vector<double>>& a,
              std::vector<std::vector<double>>* out) {
  const std::size_t n = a.size();
  auto& l = *out;
  l.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (d < -1e-10) return false;
    l[j][j] = d > 1e-12 ? std::sqrt(d) : 0.0;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
      l[i][j] = l[j][j] > 0.0 ? v / l[j][j] : 0.0;
    }
  }
  return true;
}

// cyclic Jacobi sweeps; the matrices here are tiny
double smallest_eigenvalue(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-20) break;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (std::abs(a[i][j]) < 1e-15) continue;
        const double theta =
            0.5 * std::atan2(2.0 * a[i][j], a[i][i] - a[j][j]);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
          const double ai = a[i][k], aj = a[j][k];
          a[i][k] = c * ai + s * aj;
          a[j][k] = -s * ai + c * aj;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double ai = a[k][i], aj = a[k][j];
          a[k][i] = c * ai + s * aj;
          a[k][j] = -s * ai + c * aj;
        }
      }
    }
  }
  double lo = a[0][0];
  for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, a[i][i]);
  return lo;
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

ScenarioSet sample_original(const std::vector<std::string>& names,
                            const std::vector<MarginalModel>& marginals,
                            const std::vector<std::vector<double>>& correlation,
                            int n, std::uint64_t seed) {
  const std::size_t p = marginals.size();
  if (p == 0) throw DataError("no marginals given");
  if (names.size() != p)
    throw DataError("names and marginals disagree on the parameter count");
  if (n < 1) throw DataError("sample size must be positive");
  if (correlation.size() != p)
    throw DataError("correlation matrix does not match the parameter count");
  for (std::size_t i = 0; i < p; ++i) {
    if (correlation[i].size() != p)
      throw DataError("correlation matrix is not square");
    if (std::abs(correlation[i][i] - 1.0) > 1e-9)
      throw DataError("correlation matrix needs a unit diagonal");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(correlation[i][j] - correlation[j][i]) > 1e-9)
        throw DataError("correlation matrix is not symmetric");
  }

  Rng rng(seed);
  const std::size_t un = static_cast<std::size_t>(n);

  // marginal pools first (parameter-major), copula draws second; the fixed
  // order keeps a seed reproducible
  std::vector<std::vector<double>> pool(p, std::vector<double>(un));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t nn = 0; nn < un; ++nn) pool[i][nn] = marginals[i].sample(rng);

  if (p == 1) return make_equiprobable(names, pool);

  std::vector<std::vector<double>> chol;
  if (!cholesky(correlation, &chol)) {
    const double lo = smallest_eigenvalue(correlation);
    throw DataError(format_msg(
        "correlation matrix is not positive semidefinite "
        "(smallest eigenvalue %g)",
        lo, 0.0));
  }

  std::vector<std::vector<double>> sorted = pool;
  for (auto& s : sorted) std::sort(s.begin(), s.end());

  std::vector<std::vector<double>> values(p, std::vector<double>(un));
  std::vector<double> z(p), raw(p);
  for (std::size_t nn = 0; nn < un; ++nn) {
    for (std::size_t i = 0; i < p; ++i) raw[i] = rng.normal();
    for (std::size_t i = 0; i < p; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= i; ++k) acc += chol[i][k] * raw[k];
      z[i] = acc;
    }
    for (std::size_t i = 0; i < p; ++i)
      values[i][nn] = interp_quantile(sorted[i], norm_cdf(z[i]));
  }
  return make_equiprobable(names, values);
}

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

ClusterAssignment kmeans(const ScenarioSet& set, int k, std::uint64_t seed) {
  set.validate();
  const std::size_t n = set.num_scenarios();
  const std::size_t p = set.num_params();
  if (k < 1) throw DataError("cluster count must be positive");
  if (static_cast<std::size_t>(k) > n)
    throw DataError(format_msg(
        "cluster count %g exceeds the scenario count %g",
        static_cast<double>(k), static_cast<double>(n)));

  ClusterAssignment out;
  if (static_cast<std::size_t>(k) == n) {
    out.label.resize(n);
    out.centroid.assign(n, std::vector<double>(p));
    for (std::size_t nn = 0; nn < n; ++nn) {
      out.label[nn] = static_cast<int>(nn);
      for (std::size_t i = 0; i < p; ++i) out.centroid[nn][i] = set.values[i][nn];
    }
    out.sse_trace.push_back(0.0);
    return out;
  }

  // standardize with probability-weighted mean and spread
  std::vector<double> mu(p, 0.0), sc(p, 1.0);
  for (std::size_t i = 0; i < p; ++i) {
    double m = 0.0;
    for (std::size_t nn = 0; nn < n; ++nn) m += set.values[i][nn] * set.prob[nn];
    double v = 0.0;
    for (std::size_t nn = 0; nn < n; ++nn) {
      const double d = set.values[i][nn] - m;
      v += d * d * set.prob[nn];
    }
    mu[i] = m;
    sc[i] = v > 0.0 ? std::sqrt(v) : 1.0;
  }
  std::vector<std::vector<double>> x(n, std::vector<double>(p));
  for (std::size_t nn = 0; nn < n; ++nn)
    for (std::size_t i = 0; i < p; ++i)
      x[nn][i] = (set.values[i][nn] - mu[i]) / sc[i];

  Rng rng(seed);
  const std::size_t uk = static_cast<std::size_t>(k);
  std::vector<std::vector<double>> c;
  c.reserve(uk);

  // kmeans++ with scenario probabilities as point masses
  auto pick_by_weight = [&](const std::vector<double>& w) -> std::size_t {
    double total = 0.0;
    for (double v : w) total += v;
    if (total <= 0.0) {
      for (std::size_t nn = 0; nn < n; ++nn)
        if (w[nn] > 0.0) return nn;
      return 0;
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t nn = 0; nn < n; ++nn) {
      acc += w[nn];
      if (u <= acc) return nn;
    }
    return n - 1;
  };
  c.push_back(x[pick_by_weight(set.prob)]);
  std::vector<double> d2(n);
  for (std::size_t nn = 0; nn < n; ++nn) d2[nn] = dist2(x[nn], c[0]);
  std::vector<double> w(n);
  while (c.size() < uk) {
    bool any = false;
    for (std::size_t nn = 0; nn < n; ++nn) {
      w[nn] = set.prob[nn] * d2[nn];
      any = any || w[nn] > 0.0;
    }
    std::size_t pick;
    if (any) {
      pick = pick_by_weight(w);
    } else {
      // all remaining mass sits on current centroids; take the lowest
      // point not already chosen
      pick = 0;
      for (std::size_t nn = 0; nn < n; ++nn) {
        if (d2[nn] > 0.0) { pick = nn; break; }
      }
    }
    c.push_back(x[pick]);
    for (std::size_t nn = 0; nn < n; ++nn)
      d2[nn] = std::min(d2[nn], dist2(x[nn], c.back()));
  }

  std::vector<int> label(n, 0), prev(n, -1);
  for (int sweep = 0; sweep < 300; ++sweep) {
    // assignment, ties to the lower cluster index
    for (std::size_t nn = 0; nn < n; ++nn) {
      int best = 0;
      double bd = dist2(x[nn], c[0]);
      for (std::size_t kk = 1; kk < uk; ++kk) {
        const double d = dist2(x[nn], c[kk]);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(kk);
        }
      }
      label[nn] = best;
    }
    // revive empty clusters with the point farthest from its own centroid
    std::vector<std::size_t> count(uk, 0);
    for (std::size_t nn = 0; nn < n; ++nn) count[label[nn]]++;
    for (std::size_t kk = 0; kk < uk; ++kk) {
      if (count[kk] > 0) continue;
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t nn = 0; nn < n; ++nn) {
        if (count[label[nn]] <= 1) continue;
        const double d = dist2(x[nn], c[label[nn]]);
        if (d > fd) {
          fd = d;
          far = nn;
        }
      }
      count[label[far]]--;
      label[far] = static_cast<int>(kk);
      count[kk] = 1;
      c[kk] = x[far];
    }
    // centroid update: probability-weighted mean, plain mean when the
    // member mass is zero
    for (std::size_t kk = 0; kk < uk; ++kk) {
      std::vector<double> acc(p, 0.0);
      double mass = 0.0;
      std::size_t members = 0;
      for (std::size_t nn = 0; nn < n; ++nn) {
        if (label[nn] != static_cast<int>(kk)) continue;
        members++;
        mass += set.prob[nn];
        for (std::size_t i = 0; i < p; ++i) acc[i] += set.prob[nn] * x[nn][i];
      }
      if (mass > 0.0) {
        for (std::size_t i = 0; i < p; ++i) c[kk][i] = acc[i] / mass;
      } else {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t nn = 0; nn < n; ++nn) {
          if (label[nn] != static_cast<int>(kk)) continue;
          for (std::size_t i = 0; i < p; ++i) acc[i] += x[nn][i];
        }
        for (std::size_t i = 0; i < p; ++i)
          c[kk][i] = acc[i] / static_cast<double>(members);
      }
    }
    double sse = 0.0;
    for (std::size_t nn = 0; nn < n; ++nn)
      sse += set.prob[nn] * dist2(x[nn], c[label[nn]]);
    out.sse_trace.push_back(sse);
    if (label == prev) break;
    prev = label;
  }

  out.label = std::move(label);
  out.centroid.assign(uk, std::vector<double>(p));
  for (std::size_t kk = 0; kk < uk; ++kk)
    for (std::size_t i = 0; i < p; ++i)
      out.centroid[kk][i] = c[kk][i] * sc[i] + mu[i];
  return out;
}

}  // namespace scengen
