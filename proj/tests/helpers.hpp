#pragma once

#include <string>

#include "perflab/instance.hpp"

namespace testing {

inline perflab::Instance config(const std::string& name) {
  return perflab::load_instance_file(std::string(PERFLAB_CONFIG_DIR) + "/" + name + ".ini");
}

// The canonical 1-D Gaussian instance with the given shift, ridge and base mean.
inline perflab::Instance gauss1d(double a, double lambda, double mu0 = 1.0, double lo = -3.0, double hi = 3.0) {
  perflab::Instance inst = config("gauss-mean-1d");
  inst.name = "gauss1d";
  inst.domain = perflab::Box(perflab::Vector::Constant(1, lo), perflab::Vector::Constant(1, hi));
  inst.loss.lambda = lambda;
  inst.map.base_mean = perflab::Vector::Constant(1, mu0);
  inst.map.shift = perflab::Matrix::Constant(1, 1, a);
  return inst;
}

inline perflab::Theta scalar(double x) { return perflab::Theta::Constant(1, x); }

inline perflab::EvalOptions closed() {
  perflab::EvalOptions o;
  o.mode = perflab::EvalMode::closed_form;
  return o;
}

inline perflab::EvalOptions mc(std::size_t n, std::uint64_t seed) {
  perflab::EvalOptions o;
  o.n = n;
  o.seed = perflab::SeedSpec{seed, {}};
  return o;
}

}  // namespace testing
