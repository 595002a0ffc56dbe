#include "perflab/instance.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace perflab {

namespace pt = boost::property_tree;

ConfigError::ConfigError(std::string field, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                  : (field.empty() ? message : field + ": " + message)),
      field_(std::move(field)),
      line_(line) {}

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"domain", {"lower", "upper"}},
    {"loss", {"kind", "lambda"}},
    {"map", {"kind", "base_mean", "shift", "sigma", "cost", "label_weights"}},
    {"constants", {"beta", "gamma_sc", "lip_L", "eps", "mu_wsc", "mu_rsi", "gamma_qg", "shift_bound_B"}},
};

double parse_real(const std::string& field, std::string text) {
  boost::algorithm::trim(text);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ConfigError(field, 0, "expected a real number, got '" + text + "'");
  }
  if (!std::isfinite(value)) throw ConfigError(field, 0, "value must be finite");
  return value;
}

Vector parse_vector(const std::string& field, const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::is_any_of(","));
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_real(field, parts[i]);
  return v;
}

Matrix parse_matrix(const std::string& field, const std::string& text) {
  std::vector<std::string> rows;
  boost::algorithm::split(rows, text, boost::is_any_of(";"));
  std::vector<Vector> parsed;
  for (const auto& r : rows) parsed.push_back(parse_vector(field, r));
  const auto cols = parsed.front().size();
  Matrix m(static_cast<Eigen::Index>(parsed.size()), cols);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (parsed[i].size() != cols) throw ConfigError(field, 0, "matrix rows have different lengths");
    m.row(static_cast<Eigen::Index>(i)) = parsed[i].transpose();
  }
  return m;
}

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_real(v[i]);
  }
  return out;
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += "; ";
    out += format_vector(m.row(i).transpose());
  }
  return out;
}

class SectionReader {
 public:
  SectionReader(const pt::ptree& tree, std::string section, std::vector<std::string>& defaults)
      : section_(std::move(section)), defaults_(defaults) {
    if (auto child = tree.get_child_optional(section_)) node_ = &*child;
  }

  [[nodiscard]] std::string path(const std::string& key) const { return section_ + "." + key; }

  [[nodiscard]] std::optional<std::string> raw(const std::string& key) const {
    if (!node_) return std::nullopt;
    auto v = node_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    std::string out = *v;
    boost::algorithm::trim(out);
    return out;
  }

  std::string required(const std::string& key) const {
    auto v = raw(key);
    if (!v || v->empty()) throw ConfigError(path(key), 0, "missing required field");
    return *v;
  }

  double real_or(const std::string& key, double fallback) {
    if (auto v = raw(key)) return parse_real(path(key), *v);
    defaults_.push_back(path(key));
    return fallback;
  }

  Vector vector_or(const std::string& key, const Vector& fallback) {
    if (auto v = raw(key)) return parse_vector(path(key), *v);
    defaults_.push_back(path(key));
    return fallback;
  }

  std::optional<double> optional_real(const std::string& key) const {
    if (auto v = raw(key)) return parse_real(path(key), *v);
    return std::nullopt;
  }

  std::optional<double> optional_nonneg(const std::string& key) const {
    auto v = optional_real(key);
    if (v && *v < 0.0) throw ConfigError(path(key), 0, "declared constants must be nonnegative");
    return v;
  }

 private:
  std::string section_;
  const pt::ptree* node_ = nullptr;
  std::vector<std::string>& defaults_;
};

void check_schema(const pt::ptree& tree) {
  for (const auto& [key, node] : tree) {
    if (key == "name" && node.empty()) continue;
    auto it = kSchema.find(key);
    if (it == kSchema.end()) throw ConfigError(key, 0, "unknown section or key");
    for (const auto& [field, unused] : node) {
      if (!it->second.contains(field)) throw ConfigError(key + "." + field, 0, "unknown key");
    }
  }
}

}  // namespace

void Instance::validate() const {
  const auto d = domain.dim();
  try {
    map.validate(d);
  } catch (const ContractError& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.substr(0, msg.find(' ')), 0, msg);
  }
  if (loss.lambda < 0.0) throw ConfigError("loss.lambda", 0, "must be nonnegative");
  if (loss.kind == LossKind::squared_ridge && map.data_dim() != d) {
    throw ConfigError("map", 0, "squared_ridge needs data dimension equal to the parameter dimension");
  }
  if (loss.kind == LossKind::logistic_ridge && !map.has_labels()) {
    throw ConfigError("map.label_weights", 0, "logistic_ridge needs a labelled strategic_response map");
  }
  if (loss.data_dim(d) != map.data_dim()) throw ConfigError("map", 0, "data dimension does not match the loss");
  try {
    declared.validate();
  } catch (const ContractError& e) {
    throw ConfigError("constants", 0, e.what());
  }
}

bool Instance::operator==(const Instance& other) const {
  return name == other.name && domain == other.domain && loss == other.loss && map == other.map &&
         declared == other.declared;
}

Instance load_instance(std::string_view config_text) {
  pt::ptree tree;
  std::istringstream in{std::string(config_text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", e.line(), e.message());
  }
  check_schema(tree);

  Instance inst;
  inst.name = tree.get<std::string>("name", "unnamed");
  boost::algorithm::trim(inst.name);

  SectionReader domain(tree, "domain", inst.defaults_applied);
  const Vector lower = parse_vector(domain.path("lower"), domain.required("lower"));
  const Vector upper = parse_vector(domain.path("upper"), domain.required("upper"));
  if (lower.size() != upper.size()) throw ConfigError("domain.upper", 0, "length differs from domain.lower");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) throw ConfigError("domain.upper", 0, "upper bound below lower bound");
  }
  inst.domain = ParamBox(lower, upper);
  const auto d = static_cast<Eigen::Index>(inst.domain.dim());

  SectionReader loss(tree, "loss", inst.defaults_applied);
  const std::string loss_kind = loss.required("kind");
  if (loss_kind == "squared_ridge") {
    inst.loss.kind = LossKind::squared_ridge;
  } else if (loss_kind == "logistic_ridge") {
    inst.loss.kind = LossKind::logistic_ridge;
  } else {
    throw ConfigError("loss.kind", 0, "unknown loss kind '" + loss_kind + "'");
  }
  inst.loss.lambda = loss.real_or("lambda", 0.0);
  if (inst.loss.lambda < 0.0) throw ConfigError("loss.lambda", 0, "must be nonnegative");

  SectionReader map(tree, "map", inst.defaults_applied);
  const std::string map_kind = map.required("kind");
  if (map_kind == "gaussian_location_scale") {
    inst.map.kind = MapKind::gaussian_location_scale;
    if (map.raw("cost")) throw ConfigError("map.cost", 0, "only valid for strategic_response");
    if (map.raw("label_weights")) throw ConfigError("map.label_weights", 0, "only valid for strategic_response");
    inst.map.shift = parse_matrix(map.path("shift"), map.required("shift"));
    const auto m = inst.map.shift.rows();
    if (inst.map.shift.cols() != d) throw ConfigError("map.shift", 0, "must have one column per parameter");
    inst.map.base_mean = map.vector_or("base_mean", Vector::Zero(m));
    inst.map.sigma = map.vector_or("sigma", Vector::Ones(m));
  } else if (map_kind == "strategic_response") {
    inst.map.kind = MapKind::strategic_response;
    if (map.raw("shift")) throw ConfigError("map.shift", 0, "only valid for gaussian_location_scale");
    inst.map.base_mean = map.vector_or("base_mean", Vector::Zero(d));
    inst.map.sigma = map.vector_or("sigma", Vector::Ones(inst.map.base_mean.size()));
    inst.map.cost = map.real_or("cost", 1.0);
    if (auto w = map.raw("label_weights")) inst.map.label_weights = parse_vector(map.path("label_weights"), *w);
  } else {
    throw ConfigError("map.kind", 0, "unknown map kind '" + map_kind + "'");
  }
  for (Eigen::Index i = 0; i < inst.map.sigma.size(); ++i) {
    if (!(inst.map.sigma[i] > 0.0)) throw ConfigError("map.sigma", 0, "standard deviations must be positive");
  }
  if (inst.map.kind == MapKind::strategic_response && !(inst.map.cost > 0.0)) {
    throw ConfigError("map.cost", 0, "must be positive");
  }

  SectionReader constants(tree, "constants", inst.defaults_applied);
  inst.declared.beta = constants.optional_nonneg("beta");
  inst.declared.gamma_sc = constants.optional_nonneg("gamma_sc");
  inst.declared.lip_L = constants.optional_nonneg("lip_L");
  inst.declared.eps = constants.optional_nonneg("eps");
  inst.declared.mu_wsc = constants.optional_nonneg("mu_wsc");
  inst.declared.mu_rsi = constants.optional_nonneg("mu_rsi");
  inst.declared.gamma_qg = constants.optional_nonneg("gamma_qg");
  inst.declared.shift_bound_B = constants.optional_nonneg("shift_bound_B");

  inst.validate();
  return inst;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_instance(buffer.str());
}

std::string serialize_instance(const Instance& inst) {
  std::ostringstream os;
  os << "name = " << inst.name << "\n\n";
  os << "[domain]\n";
  os << "lower = " << format_vector(inst.domain.lower()) << "\n";
  os << "upper = " << format_vector(inst.domain.upper()) << "\n\n";
  os << "[loss]\n";
  os << "kind = " << to_string(inst.loss.kind) << "\n";
  os << "lambda = " << format_real(inst.loss.lambda) << "\n\n";
  os << "[map]\n";
  os << "kind = " << to_string(inst.map.kind) << "\n";
  os << "base_mean = " << format_vector(inst.map.base_mean) << "\n";
  os << "sigma = " << format_vector(inst.map.sigma) << "\n";
  if (inst.map.kind == MapKind::gaussian_location_scale) {
    os << "shift = " << format_matrix(inst.map.shift) << "\n";
  } else {
    os << "cost = " << format_real(inst.map.cost) << "\n";
    if (inst.map.has_labels()) os << "label_weights = " << format_vector(inst.map.label_weights) << "\n";
  }
  const auto& c = inst.declared;
  if (!c.empty()) {
    os << "\n[constants]\n";
    auto put = [&](const char* key, const std::optional<double>& v) {
      if (v) os << key << " = " << format_real(*v) << "\n";
    };
    put("beta", c.beta);
    put("gamma_sc", c.gamma_sc);
    put("lip_L", c.lip_L);
    put("eps", c.eps);
    put("mu_wsc", c.mu_wsc);
    put("mu_rsi", c.mu_rsi);
    put("gamma_qg", c.gamma_qg);
    put("shift_bound_B", c.shift_bound_B);
  }
  return os.str();
}

}  // namespace perflab
