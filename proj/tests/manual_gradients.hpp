#pragma once

// Hand-derived gradients for the two-hidden-unit scenario: one residual
// point (x,t) with advection speed 3 and one initial point (x,0), unit
// weights, single-point means. Written out term by term as an oracle that
// is independent of the graph machinery it checks.
//
// Parameter order matches NetworkParams::flatten() for [2,2,1]:
//   [0] w1 (unit-1 x weight)   [1] w3 (unit-1 t weight)
//   [2] w2 (unit-2 x weight)   [3] w4 (unit-2 t weight)
//   [4] b1                     [5] b2
//   [6] w5 (output from unit 1)[7] w6 (output from unit 2)
//   [8] b3

#include <array>
#include <cmath>

#include "pinn/graph.hpp"

namespace pinn::testing {

struct ScenarioGradients {
  std::array<double, 9> residual;  // d(residual term)/d(theta)
  std::array<double, 9> initial;   // d(initial term)/d(theta)
};

inline ScenarioGradients manual_scenario_gradients(
    double x, double t, const std::array<double, 9>& p) {
  const double w1 = p[0], w3 = p[1], w2 = p[2], w4 = p[3];
  const double b1 = p[4], b2 = p[5], w5 = p[6], w6 = p[7];

  const double f1 = eval_sigmoid(w1 * x + w3 * t + b1);
  const double f2 = eval_sigmoid(w2 * x + w4 * t + b2);
  const double g1 = eval_sigmoid(w1 * x + b1);
  const double g2 = eval_sigmoid(w2 * x + b2);
  const double f1p = f1 * (1.0 - f1);
  const double f2p = f2 * (1.0 - f2);
  const double g1p = g1 * (1.0 - g1);
  const double g2p = g2 * (1.0 - g2);
  const double s1 = 3.0 * w1 + w3;
  const double s2 = 3.0 * w2 + w4;

  const double a = w5 * f1p * s1 + w6 * f2p * s2;
  const double b = w5 * g1 + w6 * g2 + p[8] - x * std::exp(-(x * x));

  ScenarioGradients out;
  out.residual[0] =
      2.0 * a * (x * w5 * s1 * f1p * (1.0 - 2.0 * f1) + 3.0 * w5 * f1p);
  out.residual[1] =
      2.0 * a * (t * w5 * s1 * f1p * (1.0 - 2.0 * f1) + w5 * f1p);
  out.residual[2] =
      2.0 * a * (x * w6 * s2 * f2p * (1.0 - 2.0 * f2) + 3.0 * w6 * f2p);
  out.residual[3] =
      2.0 * a * (t * w6 * s2 * f2p * (1.0 - 2.0 * f2) + w6 * f2p);
  out.residual[4] = 2.0 * a * (w5 * s1 * f1p * (1.0 - 2.0 * f1));
  out.residual[5] = 2.0 * a * (w6 * s2 * f2p * (1.0 - 2.0 * f2));
  out.residual[6] = 2.0 * a * (f1p * s1);
  out.residual[7] = 2.0 * a * (f2p * s2);
  out.residual[8] = 0.0;

  out.initial[0] = 2.0 * b * (x * w5 * g1p);
  out.initial[1] = 0.0;
  out.initial[2] = 2.0 * b * (x * w6 * g2p);
  out.initial[3] = 0.0;
  out.initial[4] = 2.0 * b * (w5 * g1p);
  out.initial[5] = 2.0 * b * (w6 * g2p);
  out.initial[6] = 2.0 * b * g1;
  out.initial[7] = 2.0 * b * g2;
  out.initial[8] = 2.0 * b;
  return out;
}

}  // namespace pinn::testing
