#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "hgarden/garden.hpp"
#include "hgarden/stats.hpp"

// Hyperbolic Brownian motion with generator (1/2) Delta_hyp, simulated in the upper
// half-plane: log Y is Brownian motion with drift -1/2, X has conditionally Gaussian
// increments with variance int Y^2 ds. Disk paths are Cayley images of half-plane paths.

namespace hgarden {

struct StepPolicy {
  double dt = 0.05;
  int substeps = 8;  // vertical sub-steps per reported step (fixed at 8)
  double refine_factor = 1e-3;  // bisection stops at dt * refine_factor
  double split_threshold = 20.0;  // split same-side intervals while 2|a||b|/h < threshold
  double near_depth_fraction = 0.12;  // ... and while longer than this fraction of the step (last-exit runs: 0)
};

struct PathSample {
  Model model = Model::HalfPlane;
  Point x0;
  double T = 0.0;
  std::vector<double> times;
  std::vector<Point> positions;
  std::uint64_t seed = 0;
  std::uint64_t path_id = 0;
  StepPolicy policy;
};

// Signed hyperbolic distance in half-plane coordinates, negative inside.
class Region {
 public:
  virtual ~Region() = default;
  virtual double signed_distance_hp(double x, double y, double cap) const = 0;
  // Invariant under PSL(2,Z); simulations may then work in the reduced chart.
  virtual bool modular_invariant() const { return false; }
};

class GardenRegion final : public Region {
 public:
  explicit GardenRegion(const Garden& g) : g_(g) {}
  double signed_distance_hp(double x, double y, double cap) const override {
    return g_.signed_distance_hp(x, y, cap);
  }
  bool modular_invariant() const override { return g_.kind() == Garden::Kind::ModularFord; }

 private:
  const Garden& g_;
};

// {z : rho_in < d(center, z) < rho_out}.
class AnnulusRegion final : public Region {
 public:
  AnnulusRegion(const Point& center, double rho_in, double rho_out);
  double signed_distance_hp(double x, double y, double cap) const override;

 private:
  cplx c_;
  double rho_in_, rho_out_;
  double far_u_;  // sinh^2((rho_out + 3)/2): beyond it the clamped distance is the cap for cap <= 3
};

struct McConfig {
  std::uint64_t seed = 0;
  std::size_t n_paths = 1000;
  double T = 10.0;
  StepPolicy policy;
  unsigned workers = 0;  // 0: hardware concurrency
  std::size_t first_path = 0;
};

// Number of grid steps and their common length for horizon T.
std::size_t step_count(double T, double dt);

PathSample sample_path(const Point& x0, double T, const StepPolicy& policy, std::uint64_t seed,
                       std::uint64_t path_id, const Garden* refine_in = nullptr);

double occupation_time(const PathSample& path, const Garden& G);

struct LastExit {
  double time = 0.0;  // 0 when never entered
  bool entered = false;
  bool censored = false;
};

LastExit last_exit_time(const PathSample& path, const Horoball& B);

// Occupation of every region by every path; result[i][r * K + k] is the occupation of
// region r up to checkpoints[k] along path first_path + i (K = 1 and checkpoint T if empty).
std::vector<std::vector<double>> simulate_occupation(const Point& x0,
                                                     const std::vector<const Region*>& regions,
                                                     const McConfig& cfg,
                                                     const std::vector<double>& checkpoints = {});

Estimate occupation_estimate(const Point& x0, const Garden& G, const McConfig& cfg);

struct LastExitRun {
  std::vector<LastExit> exits;
  double censoring_rate = 0.0;
  std::vector<double> uncensored_times() const;
};

LastExitRun simulate_last_exit(const Point& x0, const Horoball& B, const McConfig& cfg);

// Half-plane positions at each checkpoint, per path.
std::vector<std::vector<cplx>> simulate_endpoints(const Point& x0, const McConfig& cfg,
                                                  const std::vector<double>& checkpoints);

struct SpeedReport {
  Estimate speed;             // mean of d(x0, B_T)/T
  Estimate asymptotic_speed;  // (d(T) - d(T/2)) / (T/2)
  double q05 = 0.0, q95 = 0.0;
  double band() const { return q95 - q05; }
};

SpeedReport displacement_speed(const Point& x0, double T, std::size_t N, const McConfig& cfg);

void write_paths_csv(std::ostream& out, const std::vector<PathSample>& paths, const Garden* G);

}  // namespace hgarden
