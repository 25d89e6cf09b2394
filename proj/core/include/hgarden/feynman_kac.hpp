#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hgarden/bm.hpp"
#include "hgarden/garden.hpp"
#include "hgarden/kernels.hpp"
#include "hgarden/stats.hpp"

namespace hgarden {

class Potential {
 public:
  enum class Kind { GardenIndicator, Constant, Scaled };

  static Potential garden_indicator(std::shared_ptr<const Garden> g);
  static Potential constant(double alpha);
  static Potential scaled(double p, const Potential& inner);

  Kind kind() const { return kind_; }
  double bound() const;
  double value(const Point& x) const;

  // V = scale * base, base an indicator or the constant 1.
  double total_scale() const;
  const Garden* base_garden() const;
  bool base_is_constant() const { return base_garden() == nullptr; }
  Model model() const;

 private:
  Kind kind_ = Kind::Constant;
  double alpha_ = 0.0;
  double p_ = 1.0;
  std::shared_ptr<const Garden> garden_;
  std::shared_ptr<const Potential> inner_;
};

struct FkEstimate {
  Estimate estimate;      // E exp(int_0^t V(B_s) ds)
  double log_value = 0.0;
  double log_se = 0.0;    // delta method
  bool tolerance_ok = true;
};

FkEstimate feynman_kac_estimate(const Point& x0, double t, const Potential& V, const McConfig& cfg,
                                double rel_tol = kInf);

// Default start point: 0 in the disk, i in the half-plane.
Point default_origin(Model m);

std::vector<SpectrumFit> lyapunov_exponents(const Potential& V, const std::vector<double>& p_list,
                                            const std::vector<double>& t_grid, const McConfig& cfg,
                                            const Point* x0 = nullptr);
SpectrumFit lyapunov_exponent(const Potential& V, double p, const std::vector<double>& t_grid,
                              const McConfig& cfg, const Point* x0 = nullptr);

// int_B g_t(x0, .) / int_{B*} g_t(x0, .), B* = inflate(B, R/2), x0 on the boundary of B*.
double nonconcentration_ratio(const Horoball& B, double R, const Point& x0, double t);
double nonconcentration_ratio(const Horoball& B, const Garden& G, const Point& x0, double t);

struct WigglyReport {
  double alpha = 0.0;
  double R = 0.0;
  double min_ball_integral = 0.0;  // smallest sampled int_{B(x,R)} V dA_hyp
  bool wiggly = false;
  std::vector<SpectrumFit> fits;
  double c_hat = 0.0, c_lo = 0.0, c_hi = 0.0;
  bool positive = false;
};

// Checks int_{B(x,R)} V >= alpha on sampled centres, then fits beta(p) >= c p^2.
WigglyReport wiggly_lower_bound(const Potential& V, double alpha, double R, const std::vector<double>& p_grid,
                                const std::vector<double>& t_grid, const McConfig& cfg,
                                std::size_t n_centres = 64);

}  // namespace hgarden
