#include "cslq/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cslq/models/planar_manipulator.hpp"
#include "cslq/models/reference_path.hpp"
#include "cslq/models/tracked_base.hpp"
#include "cslq/models/wheeled_legged.hpp"

namespace cslq {

namespace {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::vector<Entry> tokenize(std::istream& is, const std::string& origin) {
  std::vector<Entry> entries;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        fail(origin, line, "malformed section header '" + text + "'");
      }
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      fail(origin, line, "expected 'key = value', got '" + text + "'");
    }
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) fail(origin, line, "empty key");
    if (section.empty()) fail(origin, line, "key '" + key + "' outside any [section]");
    entries.push_back({section, key, trim(text.substr(eq + 1)), line});
  }
  return entries;
}

double to_double(const Entry& e, const std::string& origin) {
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0') {
    fail(origin, e.line, e.section + "." + e.key + ": '" + e.value + "' is not a number");
  }
  return v;
}

long to_int(const Entry& e, const std::string& origin) {
  char* end = nullptr;
  const long v = std::strtol(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0') {
    fail(origin, e.line, e.section + "." + e.key + ": '" + e.value + "' is not an integer");
  }
  return v;
}

bool to_bool(const Entry& e, const std::string& origin) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(origin, e.line, e.section + "." + e.key + ": expected true or false, got '" + e.value + "'");
}

std::vector<double> to_list(const Entry& e, const std::string& origin) {
  std::vector<double> out;
  if (trim(e.value).empty()) return out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0') {
      fail(origin, e.line,
           e.section + "." + e.key + ": list element '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

// Round-trip exact formatting of a double.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[32];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

Eigen::MatrixXd diagonal_matrix(const std::vector<double>& d) {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(d.data(), d.size());
  return v.asDiagonal();
}

std::shared_ptr<const ReferencePath> build_path(const EePathConfig& p) {
  const auto vec2 = [](const std::vector<double>& v, const char* what) {
    if (v.size() != 2) {
      throw ConfigError(std::string("ee_path.") + what + ": expected 2 elements, got " +
                        std::to_string(v.size()));
    }
    return Eigen::Vector2d(v[0], v[1]);
  };
  if (p.type == "fixed") return std::make_shared<FixedPoint>(vec2(p.point, "point"));
  if (p.type == "line") {
    return std::make_shared<LineSegmentPath>(vec2(p.from, "from"), vec2(p.to, "to"), p.t_start,
                                             p.t_end);
  }
  if (p.type == "circle") {
    return std::make_shared<CirclePath>(vec2(p.center, "center"), p.radius, p.rate, p.phase);
  }
  if (p.type == "figure_eight") {
    return std::make_shared<FigureEightPath>(vec2(p.center, "center"), p.amplitude, p.rate);
  }
  throw ConfigError("ee_path.type: unknown path type '" + p.type + "'");
}

}  // namespace

TaskConfig TaskConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  return parse(is, path);
}

TaskConfig TaskConfig::parse(std::istream& is, const std::string& origin) {
  TaskConfig c;
  bool saw_mpc = false;
  for (const Entry& e : tokenize(is, origin)) {
    const std::string id = e.section + "." + e.key;
    if (id == "task.name") c.name = e.value;
    else if (id == "task.model") c.model = e.value;
    else if (id == "task.horizon") c.horizon = to_double(e, origin);
    else if (id == "model.cor_offset") c.cor_offset = to_double(e, origin);
    else if (id == "model.half_track") c.half_track = to_double(e, origin);
    else if (id == "model.arm_joints") c.arm_joints = static_cast<int>(to_int(e, origin));
    else if (id == "model.nonholonomic") c.nonholonomic = to_bool(e, origin);
    else if (id == "model.arm_mount_offset") c.arm_mount_offset = to_double(e, origin);
    else if (id == "model.link_lengths") c.link_lengths = to_list(e, origin);
    else if (id == "model.ee_mode") c.ee_mode = e.value;
    else if (id == "model.ee_hold_gain") c.ee_hold_gain = to_double(e, origin);
    else if (id == "model.wheel_drop") c.wheel_drop = to_double(e, origin);
    else if (id == "model.wheel_radius") c.wheel_radius = to_double(e, origin);
    else if (id == "ee_path.type") c.ee_path.type = e.value;
    else if (id == "ee_path.point") c.ee_path.point = to_list(e, origin);
    else if (id == "ee_path.from") c.ee_path.from = to_list(e, origin);
    else if (id == "ee_path.to") c.ee_path.to = to_list(e, origin);
    else if (id == "ee_path.t_start") c.ee_path.t_start = to_double(e, origin);
    else if (id == "ee_path.t_end") c.ee_path.t_end = to_double(e, origin);
    else if (id == "ee_path.center") c.ee_path.center = to_list(e, origin);
    else if (id == "ee_path.radius") c.ee_path.radius = to_double(e, origin);
    else if (id == "ee_path.rate") c.ee_path.rate = to_double(e, origin);
    else if (id == "ee_path.phase") c.ee_path.phase = to_double(e, origin);
    else if (id == "ee_path.amplitude") c.ee_path.amplitude = to_double(e, origin);
    else if (id == "initial.state") c.initial_state = to_list(e, origin);
    else if (id == "cost.x_ref") c.x_ref = to_list(e, origin);
    else if (id == "cost.r_diag") c.r_diag = to_list(e, origin);
    else if (id == "cost.q_diag") c.q_diag = to_list(e, origin);
    else if (id == "cost.qf_diag") c.qf_diag = to_list(e, origin);
    else if (id == "solver.max_iterations") c.solver.max_iterations = to_int(e, origin);
    else if (id == "solver.cost_rel_tol") c.solver.cost_rel_tol = to_double(e, origin);
    else if (id == "solver.constraint_ise_tol") c.solver.constraint_ise_tol = to_double(e, origin);
    else if (id == "solver.divergence_bound") c.solver.divergence_bound = to_double(e, origin);
    else if (id == "solver.alpha_min") c.solver.line_search.alpha_min = to_double(e, origin);
    else if (id == "solver.reduction") c.solver.line_search.reduction = to_double(e, origin);
    else if (id == "solver.merit_constraint_weight")
      c.solver.line_search.merit_constraint_weight = to_double(e, origin);
    else if (id == "solver.forward_abs_tol") c.solver.forward.abs_tol = to_double(e, origin);
    else if (id == "solver.forward_rel_tol") c.solver.forward.rel_tol = to_double(e, origin);
    else if (id == "solver.forward_max_step") c.solver.forward.max_step = to_double(e, origin);
    else if (id == "solver.backward_abs_tol") c.solver.backward.abs_tol = to_double(e, origin);
    else if (id == "solver.backward_rel_tol") c.solver.backward.rel_tol = to_double(e, origin);
    else if (id == "solver.backward_max_step") c.solver.backward.max_step = to_double(e, origin);
    else if (e.section == "mpc") {
      saw_mpc = true;
      if (e.key == "horizon") c.mpc.horizon = to_double(e, origin);
      else if (e.key == "inner_rate") c.mpc.inner_rate = to_double(e, origin);
      else if (e.key == "outer_rate") c.mpc.outer_rate = to_double(e, origin);
      else if (e.key == "estimator_rate") c.mpc.estimator_rate = to_double(e, origin);
      else if (e.key == "warm_start") c.mpc.warm_start = to_bool(e, origin);
      else if (e.key == "warm_iteration_cap")
        c.mpc.warm_iteration_cap = static_cast<std::size_t>(to_int(e, origin));
      else if (e.key == "replanning") c.mpc.replanning = to_bool(e, origin);
      else if (e.key == "goal_tolerance") c.mpc.goal_tolerance = to_double(e, origin);
      else if (e.key == "timeout") c.mpc.timeout = to_double(e, origin);
      else if (e.key == "slip_right") c.mpc.slip_right = to_double(e, origin);
      else if (e.key == "slip_left") c.mpc.slip_left = to_double(e, origin);
      else if (e.key == "jump_magnitude") c.mpc.jump_magnitude = to_double(e, origin);
      else if (e.key == "jump_rate") c.mpc.jump_rate = to_double(e, origin);
      else if (e.key == "ee_displacement_bound")
        c.mpc.ee_displacement_bound = to_double(e, origin);
      else if (e.key == "track_speed_limit") c.mpc.track_speed_limit = to_double(e, origin);
      else if (e.key == "seed") c.mpc.seed = static_cast<unsigned>(to_int(e, origin));
      else fail(origin, e.line, "unknown key '" + id + "'");
    } else {
      fail(origin, e.line, "unknown key '" + id + "'");
    }
  }
  c.mpc.enabled = saw_mpc;
  return c;
}

void TaskConfig::serialize(std::ostream& os) const {
  os << "[task]\n";
  os << "name = " << name << "\n";
  os << "model = " << model << "\n";
  os << "horizon = " << fmt(horizon) << "\n";

  os << "\n[model]\n";
  if (model == "tracked_base" || model == "planar_manipulator") {
    os << "cor_offset = " << fmt(cor_offset) << "\n";
    os << "half_track = " << fmt(half_track) << "\n";
    os << "nonholonomic = " << (nonholonomic ? "true" : "false") << "\n";
  }
  if (model == "tracked_base") {
    os << "arm_joints = " << arm_joints << "\n";
  }
  if (model == "planar_manipulator") {
    os << "arm_mount_offset = " << fmt(arm_mount_offset) << "\n";
    os << "link_lengths = " << fmt(link_lengths) << "\n";
    os << "ee_mode = " << ee_mode << "\n";
    if (ee_mode == "hold") os << "ee_hold_gain = " << fmt(ee_hold_gain) << "\n";
  }
  if (model == "wheeled_legged") {
    os << "wheel_drop = " << fmt(wheel_drop) << "\n";
    os << "wheel_radius = " << fmt(wheel_radius) << "\n";
  }

  if (model == "planar_manipulator" && ee_mode != "none") {
    os << "\n[ee_path]\n";
    os << "type = " << ee_path.type << "\n";
    if (ee_path.type == "fixed") {
      os << "point = " << fmt(ee_path.point) << "\n";
    } else if (ee_path.type == "line") {
      os << "from = " << fmt(ee_path.from) << "\n";
      os << "to = " << fmt(ee_path.to) << "\n";
      os << "t_start = " << fmt(ee_path.t_start) << "\n";
      os << "t_end = " << fmt(ee_path.t_end) << "\n";
    } else if (ee_path.type == "circle") {
      os << "center = " << fmt(ee_path.center) << "\n";
      os << "radius = " << fmt(ee_path.radius) << "\n";
      os << "rate = " << fmt(ee_path.rate) << "\n";
      os << "phase = " << fmt(ee_path.phase) << "\n";
    } else if (ee_path.type == "figure_eight") {
      os << "center = " << fmt(ee_path.center) << "\n";
      os << "amplitude = " << fmt(ee_path.amplitude) << "\n";
      os << "rate = " << fmt(ee_path.rate) << "\n";
    }
  }

  if (!initial_state.empty()) {
    os << "\n[initial]\n";
    os << "state = " << fmt(initial_state) << "\n";
  }

  os << "\n[cost]\n";
  os << "x_ref = " << fmt(x_ref) << "\n";
  os << "r_diag = " << fmt(r_diag) << "\n";
  if (!q_diag.empty()) os << "q_diag = " << fmt(q_diag) << "\n";
  os << "qf_diag = " << fmt(qf_diag) << "\n";

  os << "\n[solver]\n";
  os << "max_iterations = " << solver.max_iterations << "\n";
  os << "cost_rel_tol = " << fmt(solver.cost_rel_tol) << "\n";
  os << "constraint_ise_tol = " << fmt(solver.constraint_ise_tol) << "\n";
  os << "divergence_bound = " << fmt(solver.divergence_bound) << "\n";
  os << "alpha_min = " << fmt(solver.line_search.alpha_min) << "\n";
  os << "reduction = " << fmt(solver.line_search.reduction) << "\n";
  os << "merit_constraint_weight = " << fmt(solver.line_search.merit_constraint_weight) << "\n";
  os << "forward_abs_tol = " << fmt(solver.forward.abs_tol) << "\n";
  os << "forward_rel_tol = " << fmt(solver.forward.rel_tol) << "\n";
  os << "forward_max_step = " << fmt(solver.forward.max_step) << "\n";
  os << "backward_abs_tol = " << fmt(solver.backward.abs_tol) << "\n";
  os << "backward_rel_tol = " << fmt(solver.backward.rel_tol) << "\n";
  os << "backward_max_step = " << fmt(solver.backward.max_step) << "\n";

  if (mpc.enabled) {
    os << "\n[mpc]\n";
    os << "horizon = " << fmt(mpc.horizon) << "\n";
    os << "inner_rate = " << fmt(mpc.inner_rate) << "\n";
    os << "outer_rate = " << fmt(mpc.outer_rate) << "\n";
    os << "estimator_rate = " << fmt(mpc.estimator_rate) << "\n";
    os << "warm_start = " << (mpc.warm_start ? "true" : "false") << "\n";
    os << "warm_iteration_cap = " << mpc.warm_iteration_cap << "\n";
    os << "replanning = " << (mpc.replanning ? "true" : "false") << "\n";
    os << "goal_tolerance = " << fmt(mpc.goal_tolerance) << "\n";
    os << "timeout = " << fmt(mpc.timeout) << "\n";
    os << "slip_right = " << fmt(mpc.slip_right) << "\n";
    os << "slip_left = " << fmt(mpc.slip_left) << "\n";
    os << "jump_magnitude = " << fmt(mpc.jump_magnitude) << "\n";
    os << "jump_rate = " << fmt(mpc.jump_rate) << "\n";
    os << "ee_displacement_bound = " << fmt(mpc.ee_displacement_bound) << "\n";
    os << "track_speed_limit = " << fmt(mpc.track_speed_limit) << "\n";
    os << "seed = " << mpc.seed << "\n";
  }
}

TaskObjects build_task(const TaskConfig& c) {
  TaskObjects out;

  if (c.model == "tracked_base") {
    TrackedBaseModel::Params p;
    p.cor_offset = c.cor_offset;
    p.half_track = c.half_track;
    p.arm_joints = c.arm_joints;
    p.nonholonomic = c.nonholonomic;
    out.model = std::make_shared<TrackedBaseModel>(p);
  } else if (c.model == "planar_manipulator") {
    PlanarManipulatorModel::Params p;
    p.cor_offset = c.cor_offset;
    p.half_track = c.half_track;
    p.arm_mount_offset = c.arm_mount_offset;
    if (c.link_lengths.size() != 3) {
      throw ConfigError("model.link_lengths: expected 3 elements, got " +
                        std::to_string(c.link_lengths.size()));
    }
    std::copy(c.link_lengths.begin(), c.link_lengths.end(), p.link_lengths.begin());
    if (c.ee_mode == "none") p.ee_mode = EeConstraintMode::none;
    else if (c.ee_mode == "position") p.ee_mode = EeConstraintMode::position;
    else if (c.ee_mode == "velocity") p.ee_mode = EeConstraintMode::velocity;
    else if (c.ee_mode == "hold") p.ee_mode = EeConstraintMode::hold;
    else throw ConfigError("model.ee_mode: unknown mode '" + c.ee_mode + "'");
    if (!(c.ee_hold_gain > 0.0)) {
      throw ConfigError("model.ee_hold_gain: must be > 0");
    }
    p.hold_gain = c.ee_hold_gain;
    if (p.ee_mode != EeConstraintMode::none) p.ee_reference = build_path(c.ee_path);
    out.model = std::make_shared<PlanarManipulatorModel>(p);
  } else if (c.model == "wheeled_legged") {
    WheeledLeggedModel::Params p;
    p.wheel_drop = c.wheel_drop;
    p.wheel_radius = c.wheel_radius;
    out.model = std::make_shared<WheeledLeggedModel>(p);
  } else {
    throw ConfigError("task.model: unknown model '" + c.model +
                      "' (expected tracked_base, planar_manipulator or wheeled_legged)");
  }

  const Eigen::Index n_x = out.model->state_dim();
  const Eigen::Index n_u = out.model->input_dim();

  const auto check_size = [](const std::vector<double>& v, Eigen::Index want, const char* field) {
    if (static_cast<Eigen::Index>(v.size()) != want) {
      throw ConfigError(std::string(field) + ": expected " + std::to_string(want) +
                        " elements for this model, got " + std::to_string(v.size()));
    }
  };

  if (c.initial_state.empty()) {
    out.x0 = Eigen::VectorXd::Zero(n_x);
    if (auto* wl = dynamic_cast<const WheeledLeggedModel*>(out.model.get())) {
      out.x0 = wl->nominal_state(0.0, 0.0, 0.0);
    }
  } else {
    check_size(c.initial_state, n_x, "initial.state");
    out.x0 = Eigen::Map<const Eigen::VectorXd>(c.initial_state.data(), n_x);
  }

  check_size(c.x_ref, n_x, "cost.x_ref");
  check_size(c.r_diag, n_u, "cost.r_diag");
  check_size(c.qf_diag, n_x, "cost.qf_diag");
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n_x, n_x);
  if (!c.q_diag.empty()) {
    check_size(c.q_diag, n_x, "cost.q_diag");
    Q = diagonal_matrix(c.q_diag);
  }
  try {
    out.cost = std::make_shared<QuadraticCost>(
        diagonal_matrix(c.r_diag), Q, diagonal_matrix(c.qf_diag),
        Eigen::Map<const Eigen::VectorXd>(c.x_ref.data(), n_x));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("cost: ") + e.what());
  }

  if (!(c.horizon > 0.0)) throw ConfigError("task.horizon: must be positive");
  try {
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  if (c.mpc.enabled) {
    if (!(c.mpc.inner_rate > c.mpc.outer_rate) || !(c.mpc.outer_rate > 0.0)) {
      throw ConfigError("mpc: need inner_rate > outer_rate > 0");
    }
    if (!(c.mpc.slip_right >= 0.0) || !(c.mpc.slip_left >= 0.0)) {
      throw ConfigError("mpc: slip factors must be non-negative");
    }
    if (!(c.mpc.horizon > 0.0) || !(c.mpc.timeout > 0.0)) {
      throw ConfigError("mpc: horizon and timeout must be positive");
    }
    if (!(c.mpc.track_speed_limit > 0.0)) {
      throw ConfigError("mpc: track_speed_limit must be positive");
    }
  }
  return out;
}

}  // namespace cslq
