#include "perflab/constants.hpp"

#include <algorithm>

#include "perflab/transport.hpp"

namespace perflab {

namespace {

constexpr std::size_t kAssignmentRows = 256;
constexpr std::uint64_t kRegionStream = 0x5e610;
constexpr std::uint64_t kProbeStream = 0xc0457;

}  // namespace

Box data_region(const Instance& inst, const EvalOptions& opts) {
  if (opts.mode == EvalMode::closed_form) return quantile_region(inst.map, inst.domain, 0.999, opts);
  auto sampled = opts.with_seed(opts.seed.child(kRegionStream));
  sampled.n = std::clamp<std::size_t>(opts.n, 2000, 20000);
  return quantile_region(inst.map, inst.domain, 0.999, sampled);
}

LossConstants loss_constants(const Instance& inst, const EvalOptions& opts) {
  const Box region = data_region(inst, opts);
  if (inst.loss.kind == LossKind::squared_ridge) return analytic_constants(inst.loss, inst.domain, region);
  return estimate_constants(inst.loss, inst.domain, region, 2000, opts.seed.child(kProbeStream));
}

SourcedConstant resolve_beta(const Instance& inst, const EvalOptions& opts) {
  if (inst.declared.beta) return {*inst.declared.beta, ConstantSource::declared};
  const auto c = loss_constants(inst, opts);
  return {c.beta, c.source};
}

SourcedConstant resolve_gamma_sc(const Instance& inst, const EvalOptions& opts) {
  if (inst.declared.gamma_sc) return {*inst.declared.gamma_sc, ConstantSource::declared};
  const auto c = loss_constants(inst, opts);
  return {c.gamma_sc, c.source};
}

SourcedConstant resolve_lip_L(const Instance& inst, const EvalOptions& opts) {
  if (inst.declared.lip_L) return {*inst.declared.lip_L, ConstantSource::declared};
  const auto c = loss_constants(inst, opts);
  return {c.lip_value, c.source};
}

SourcedConstant resolve_eps(const Instance& inst) {
  if (inst.declared.eps) return {*inst.declared.eps, ConstantSource::declared};
  return {translation_norm(inst.map, inst.dim()), ConstantSource::analytic};
}

double induced_w1(const Instance& inst, const Theta& theta1, const Theta& theta2, const EvalOptions& opts) {
  if (opts.mode == EvalMode::closed_form && inst.map.kind == MapKind::gaussian_location_scale) {
    return w1_gaussian(inst.map, theta1, theta2).value;
  }
  std::size_t n = opts.n;
  if (inst.data_dim() > 1) n = std::min(n, kAssignmentRows);
  const auto a = sample(inst.map, theta1, n, opts.seed);
  const auto b = sample(inst.map, theta2, n, opts.seed);
  return w1(a, b).value;
}

SourcedConstant resolve_shift_bound(const Instance& inst, const EvalOptions& opts) {
  if (inst.declared.shift_bound_B) return {*inst.declared.shift_bound_B, ConstantSource::declared};
  // 50 points on a line; coarser per-axis grids above one dimension keep the
  // pairwise assignment count manageable
  const auto d = inst.dim();
  const std::size_t per_axis = d == 1 ? 50 : (d == 2 ? 5 : 3);
  std::vector<Theta> grid;
  {
    Vector h = (inst.domain.upper() - inst.domain.lower()) / static_cast<double>(per_axis - 1);
    std::vector<std::size_t> idx(d, 0);
    while (true) {
      Theta p(static_cast<Eigen::Index>(d));
      for (std::size_t j = 0; j < d; ++j) {
        const auto e = static_cast<Eigen::Index>(j);
        p[e] = idx[j] + 1 == per_axis ? inst.domain.upper()[e] : inst.domain.lower()[e] + static_cast<double>(idx[j]) * h[e];
      }
      grid.push_back(std::move(p));
      std::size_t j = d;
      while (j > 0 && ++idx[j - 1] == per_axis) idx[--j] = 0;
      if (j == 0) break;
    }
  }
  double best = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = i + 1; k < grid.size(); ++k) best = std::max(best, induced_w1(inst, grid[i], grid[k], opts));
  }
  return {best, ConstantSource::estimated};
}

}  // namespace perflab
