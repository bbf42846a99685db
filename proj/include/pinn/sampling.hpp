#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace pinn {

/// Deterministic 64-bit generator: xoshiro256++ state seeded with
/// splitmix64. Pure integer arithmetic, so sequences are bit-identical
/// across platforms; the reference outputs for seed 1 are frozen in the
/// test suite.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform double in [0,1), 53-bit resolution.
  double next_unit();
  /// Uniform double in (0,1) — rejects the zero draw.
  double next_open_unit();
  /// Uniform double in (0,1].
  double next_half_open_unit();

 private:
  std::uint64_t state_[4];
};

struct SpaceTimeDomain {
  double x_min = -1.5;
  double x_max = 1.5;
  double t_min = 0.0;
  double t_max = 2.0;

  void validate() const;  // x_min < x_max, t_min <= t_max
};

struct Point {
  double x = 0.0;
  double t = 0.0;
};

struct Observation {
  double x = 0.0;
  double t = 0.0;
  double u = 0.0;
};

enum class SampleMode { kUniformRandom, kEquispacedGrid };

/// The sampled training sets: interior residual points, wall points,
/// initial-time points, and (for inverse problems) observed solution
/// values.
struct CollocationSet {
  std::vector<Point> interior;
  std::vector<Point> boundary;
  std::vector<Point> initial;
  std::vector<Observation> observations;
};

/// n points with x strictly inside (x_min,x_max) and t in (t_min,t_max].
/// Grid mode factorizes n = n_x * n_t with n_x = ceil(sqrt(n)) and places
/// points at interior offset fractions (i+1)/(n_x+1), so no grid point
/// ever lands on a wall or the initial line.
std::vector<Point> sample_interior(const SpaceTimeDomain& domain, int n,
                                   std::uint64_t seed, SampleMode mode);

/// n points alternating between the x_min and x_max walls (even split for
/// even n), t uniform.
std::vector<Point> sample_boundary(const SpaceTimeDomain& domain, int n,
                                   std::uint64_t seed,
                                   SampleMode mode = SampleMode::kUniformRandom);

/// n points with t = t_min exactly, x uniform over [x_min, x_max].
std::vector<Point> sample_initial(const SpaceTimeDomain& domain, int n,
                                  std::uint64_t seed,
                                  SampleMode mode = SampleMode::kUniformRandom);

/// n_x-by-n_t equispaced grid including the domain corners, with the
/// observed value taken from `truth`. A single-point axis collapses to the
/// domain midpoint.
std::vector<Observation> make_observation_grid(
    const SpaceTimeDomain& domain, int n_x, int n_t,
    const std::function<double(double, double)>& truth);

/// Audit dump, columns x,t (points) or x,t,u (observations).
void write_points_csv(std::ostream& out, const std::vector<Point>& points);
void write_observations_csv(std::ostream& out,
                            const std::vector<Observation>& observations);

}  // namespace pinn
