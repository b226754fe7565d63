#pragma once

// Deliberately simple fixed-step explicit Euler for reaction networks.
// Works straight off the reaction list (law of mass action applied per step),
// so it shares no code with mass_action_compile or the adaptive integrator.

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "lbd/kinetics.hpp"

namespace oracle {

inline void reaction_rhs(const lbd::kinetics::ReactionNetwork& net, const Eigen::VectorXd& z,
                         Eigen::VectorXd& dz) {
  dz.setZero();
  for (const auto& rx : net.reactions) {
    double rate = rx.rate;
    for (const auto& [idx, st] : rx.reactants)
      for (int s = 0; s < st; ++s) rate *= z[idx];
    for (const auto& [idx, st] : rx.reactants) dz[idx] -= st * rate;
    for (const auto& [idx, st] : rx.products) dz[idx] += st * rate;
  }
}

/// Euler integration of the network (plus optional constant forcing on
/// [0, t_force)) sampled at integer multiples of sample_every * dt.
inline std::vector<Eigen::VectorXd> euler_network(const lbd::kinetics::ReactionNetwork& net,
                                                  Eigen::VectorXd z, double dt, long steps,
                                                  long sample_every,
                                                  const Eigen::VectorXd* forcing = nullptr,
                                                  double t_force = 0.0) {
  std::vector<Eigen::VectorXd> samples;
  samples.push_back(z);
  Eigen::VectorXd dz(z.size());
  for (long i = 0; i < steps; ++i) {
    reaction_rhs(net, z, dz);
    if (forcing && i * dt < t_force) dz += *forcing;
    z += dt * dz;
    if ((i + 1) % sample_every == 0) samples.push_back(z);
  }
  return samples;
}

}  // namespace oracle
