#include "pinn/sampling.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pinn/csv.hpp"

namespace pinn {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) {
    word = splitmix64(s);
  }
}

std::uint64_t Rng::next_u64() {
  std::uint64_t* s = state_;
  const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_open_unit() {
  // The zero draw has probability 2^-53; rejecting it keeps strict
  // interior membership exact rather than almost-sure.
  for (;;) {
    const double u = next_unit();
    if (u != 0.0) return u;
  }
}

double Rng::next_half_open_unit() {
  return 1.0 - next_unit();
}

void SpaceTimeDomain::validate() const {
  if (!(x_min < x_max)) {
    throw std::invalid_argument("domain: x_min must be < x_max");
  }
  if (!(t_min <= t_max)) {
    throw std::invalid_argument("domain: t_min must be <= t_max");
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) ||
      !std::isfinite(t_min) || !std::isfinite(t_max)) {
    throw std::invalid_argument("domain: bounds must be finite");
  }
}

std::vector<Point> sample_interior(const SpaceTimeDomain& domain, int n,
                                   std::uint64_t seed, SampleMode mode) {
  domain.validate();
  if (n < 1) throw std::invalid_argument("sample_interior: n must be >= 1");

  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(n));
  const double wx = domain.x_max - domain.x_min;
  const double wt = domain.t_max - domain.t_min;

  if (mode == SampleMode::kUniformRandom) {
    Rng rng(seed);
    while (static_cast<int>(points.size()) < n) {
      const double x = domain.x_min + rng.next_open_unit() * wx;
      const double t = domain.t_min + rng.next_half_open_unit() * wt;
      if (x <= domain.x_min || x >= domain.x_max) continue;  // rounding guard
      points.push_back({x, t});
    }
    return points;
  }

  const int nx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int nt = (n + nx - 1) / nx;
  for (int j = 0; j < nt && static_cast<int>(points.size()) < n; ++j) {
    for (int i = 0; i < nx && static_cast<int>(points.size()) < n; ++i) {
      const double fx = static_cast<double>(i + 1) / (nx + 1);
      const double ft = static_cast<double>(j + 1) / (nt + 1);
      points.push_back({domain.x_min + fx * wx, domain.t_min + ft * wt});
    }
  }
  return points;
}

std::vector<Point> sample_boundary(const SpaceTimeDomain& domain, int n,
                                   std::uint64_t seed, SampleMode mode) {
  domain.validate();
  if (n < 1) throw std::invalid_argument("sample_boundary: n must be >= 1");

  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(n));
  const double wt = domain.t_max - domain.t_min;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const double wall = (i % 2 == 0) ? domain.x_min : domain.x_max;
    double t;
    if (mode == SampleMode::kUniformRandom) {
      t = domain.t_min + rng.next_unit() * wt;
    } else {
      const int per_wall = (n + 1) / 2;
      const int k = i / 2;
      t = domain.t_min + (static_cast<double>(k + 1) / (per_wall + 1)) * wt;
    }
    points.push_back({wall, t});
  }
  return points;
}

std::vector<Point> sample_initial(const SpaceTimeDomain& domain, int n,
                                  std::uint64_t seed, SampleMode mode) {
  domain.validate();
  if (n < 1) throw std::invalid_argument("sample_initial: n must be >= 1");

  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(n));
  const double wx = domain.x_max - domain.x_min;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    double x;
    if (mode == SampleMode::kUniformRandom) {
      x = domain.x_min + rng.next_unit() * wx;
    } else {
      x = domain.x_min + (static_cast<double>(i + 1) / (n + 1)) * wx;
    }
    points.push_back({x, domain.t_min});
  }
  return points;
}

std::vector<Observation> make_observation_grid(
    const SpaceTimeDomain& domain, int n_x, int n_t,
    const std::function<double(double, double)>& truth) {
  domain.validate();
  if (n_x < 1 || n_t < 1) {
    throw std::invalid_argument("make_observation_grid: axes must be >= 1");
  }
  auto axis_value = [](double lo, double hi, int i, int n) {
    if (n == 1) return lo + 0.5 * (hi - lo);
    return lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  };
  std::vector<Observation> obs;
  obs.reserve(static_cast<std::size_t>(n_x) * static_cast<std::size_t>(n_t));
  for (int j = 0; j < n_t; ++j) {
    for (int i = 0; i < n_x; ++i) {
      const double x = axis_value(domain.x_min, domain.x_max, i, n_x);
      const double t = axis_value(domain.t_min, domain.t_max, j, n_t);
      obs.push_back({x, t, truth(x, t)});
    }
  }
  return obs;
}

void write_points_csv(std::ostream& out, const std::vector<Point>& points) {
  out << "x,t\n";
  for (const Point& p : points) {
    out << format_double(p.x) << ',' << format_double(p.t) << '\n';
  }
}

void write_observations_csv(std::ostream& out,
                            const std::vector<Observation>& observations) {
  out << "x,t,u\n";
  for (const Observation& o : observations) {
    out << format_double(o.x) << ',' << format_double(o.t) << ','
        << format_double(o.u) << '\n';
  }
}

}  // namespace pinn
