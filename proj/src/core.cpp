#include "perflab/core.hpp"

#include <cmath>
#include <sstream>

namespace perflab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Box::Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0) throw ContractError("box must have dimension >= 1");
  if (lower_.size() != upper_.size()) throw ContractError("box bounds have different lengths");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
      throw ContractError("box bounds must be finite");
    }
    if (lower_[i] > upper_[i]) {
      std::ostringstream os;
      os << "box is empty in coordinate " << i << ": lower " << lower_[i] << " > upper " << upper_[i];
      throw ContractError(os.str());
    }
  }
}

bool Box::contains(const Vector& x, double slack) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] - slack || x[i] > upper_[i] + slack) return false;
  }
  return true;
}

bool Box::operator==(const Box& other) const {
  return lower_.size() == other.lower_.size() && lower_ == other.lower_ && upper_ == other.upper_;
}

Theta project(const Theta& theta, const Box& box) {
  if (static_cast<std::size_t>(theta.size()) != box.dim()) {
    std::ostringstream os;
    os << "project: theta has dimension " << theta.size() << " but box has dimension " << box.dim();
    throw ContractError(os.str());
  }
  return theta.cwiseMax(box.lower()).cwiseMin(box.upper());
}

Theta uniform_point(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Theta x(static_cast<Eigen::Index>(box.dim()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = box.lower()[i] + unit(rng) * (box.upper()[i] - box.lower()[i]);
  }
  return x;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {lo};
  out.reserve(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

bool ConstantSet::empty() const {
  return !beta && !gamma_sc && !lip_L && !eps && !mu_wsc && !mu_rsi && !gamma_qg && !shift_bound_B;
}

void ConstantSet::validate() const {
  const std::pair<const char*, const std::optional<double>*> entries[] = {
      {"beta", &beta},     {"gamma_sc", &gamma_sc}, {"lip_L", &lip_L},       {"eps", &eps},
      {"mu_wsc", &mu_wsc}, {"mu_rsi", &mu_rsi},     {"gamma_qg", &gamma_qg}, {"shift_bound_B", &shift_bound_B}};
  for (const auto& [name, value] : entries) {
    if (*value && (!std::isfinite(**value) || **value < 0.0)) {
      throw ContractError(std::string("constant ") + name + " must be finite and nonnegative");
    }
  }
}

std::string_view to_string(ConstantSource source) {
  switch (source) {
    case ConstantSource::declared: return "declared";
    case ConstantSource::analytic: return "analytic";
    case ConstantSource::estimated: return "estimated";
  }
  return "unknown";
}

std::string_view to_string(EvalMode mode) {
  return mode == EvalMode::closed_form ? "closed_form" : "monte_carlo";
}

SeedSpec SeedSpec::child(std::uint64_t label) const {
  SeedSpec out = *this;
  out.stream_path.push_back(label);
  return out;
}

std::uint64_t SeedSpec::stream_key() const {
  std::uint64_t h = splitmix64(root_seed);
  for (std::uint64_t label : stream_path) {
    h = splitmix64(h ^ splitmix64(label + 0x632BE59BD9B4E019ULL));
  }
  return h;
}

std::mt19937_64 SeedSpec::engine() const { return std::mt19937_64(stream_key()); }

void require_same_dim(const Vector& a, const Vector& b, std::string_view what) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.size() << " vs " << b.size() << ")";
    throw ContractError(os.str());
  }
}

}  // namespace perflab
