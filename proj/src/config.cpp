// Copyright 2026 The sqfilter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sqfilter/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sqf {

using json = nlohmann::ordered_json;

namespace {

// --- reading --------------------------------------------------------------

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

long read_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long>();
}

cdouble read_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {read_number(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [re, im]");
  return {read_number(j[0], path + "[0]"), read_number(j[1], path + "[1]")};
}

MatrixXc read_matrix(const json& j, const std::string& path, long d) {
  if (!j.is_array() || long(j.size()) != d) {
    throw ConfigError(path, "expected " + std::to_string(d) + " rows");
  }
  MatrixXc m(d, d);
  for (long i = 0; i < d; ++i) {
    const auto row_path = path + "[" + std::to_string(i) + "]";
    const auto& row = j[i];
    if (!row.is_array() || long(row.size()) != d) {
      throw ConfigError(row_path, "expected " + std::to_string(d) + " entries");
    }
    for (long k = 0; k < d; ++k) m(i, k) = read_complex(row[k], row_path + "[" + std::to_string(k) + "]");
  }
  return m;
}

template <typename Fn>
void optional(const json& obj, const char* key, Fn&& fn) {
  if (obj.contains(key)) fn(obj.at(key));
}

BathConfig read_bath(const json& j) {
  require_object(j, "bath");
  if (j.size() != 1) {
    throw ConfigError("bath", "exactly one of \"nm\", \"bv\", \"hkkr\" is required");
  }
  reject_unknown(j, "bath", {"nm", "bv", "hkkr"});
  BathConfig b;
  const std::string key = j.begin().key();
  const json& body = j.begin().value();
  const std::string path = "bath." + key;
  require_object(body, path);
  if (key == "bv") {
    reject_unknown(body, path, {"r", "rho", "theta"});
    b.kind = BathKind::bv;
    b.r = read_number(body.at("r"), path + ".r");
    b.rho = read_number(body.at("rho"), path + ".rho");
    b.theta = body.contains("theta") ? read_number(body.at("theta"), path + ".theta") : 0.0;
    if (b.r < 0 || b.rho < 0) throw ConfigError(path, "r and rho must be non-negative");
  } else {
    reject_unknown(body, path, {"n", "m"});
    b.kind = key == "nm" ? BathKind::nm : BathKind::hkkr;
    if (!body.contains("n")) throw ConfigError(path + ".n", "missing");
    b.n = read_number(body.at("n"), path + ".n");
    b.m = body.contains("m") ? read_complex(body.at("m"), path + ".m") : cdouble(0);
    try {
      validate(SqueezingParams<double>{b.n, b.m});
    } catch (const ValidationError& e) {
      throw ConfigError(path, e.what());
    }
    if (b.kind == BathKind::hkkr &&
        classify(SqueezingParams<double>{b.n, b.m}) == SqueezingClass::maximal) {
      throw ConfigError(path, "the hkkr representation requires sub-maximal squeezing");
    }
  }
  return b;
}

ObservableSpec read_observable(const json& j, const std::string& path, long d) {
  ObservableSpec o;
  if (j.is_string()) {
    o.name = j.get<std::string>();
    if (d != 2) throw ConfigError(path, "named observables require d = 2");
    try {
      o.matrix = named_observable(o.name);
    } catch (const ValidationError& e) {
      throw ConfigError(path, e.what());
    }
    return o;
  }
  require_object(j, path);
  reject_unknown(j, path, {"name", "matrix"});
  if (!j.contains("name") || !j.at("name").is_string()) throw ConfigError(path + ".name", "expected a string");
  o.name = j.at("name").get<std::string>();
  o.named = false;
  if (!j.contains("matrix")) throw ConfigError(path + ".matrix", "missing");
  o.matrix = read_matrix(j.at("matrix"), path + ".matrix", d);
  return o;
}

RunSection read_run(const json& j, long d) {
  require_object(j, "run");
  reject_unknown(j, "run", {"T", "dt", "trajectories", "seed", "mode", "observables", "record_stride",
                            "snapshot_stride", "threads", "initial_state"});
  RunSection r;
  optional(j, "T", [&](const json& v) { r.duration = read_number(v, "run.T"); });
  optional(j, "dt", [&](const json& v) { r.dt = read_number(v, "run.dt"); });
  if (!(r.duration > 0)) throw ConfigError("run.T", "must be positive");
  if (!(r.dt > 0)) throw ConfigError("run.dt", "must be positive");
  try {
    step_count(r.duration, r.dt);
  } catch (const ValidationError&) {
    throw ConfigError("run.T", "must be an integer multiple of run.dt");
  }
  optional(j, "trajectories", [&](const json& v) { r.trajectories = read_integer(v, "run.trajectories"); });
  if (r.trajectories < 1) throw ConfigError("run.trajectories", "must be >= 1");
  optional(j, "seed", [&](const json& v) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError("run.seed", "expected a non-negative integer");
    }
    r.seed = v.get<std::uint64_t>();
  });
  optional(j, "mode", [&](const json& v) {
    const std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "kushner") r.mode = RunMode::kushner;
    else if (s == "zakai") r.mode = RunMode::zakai;
    else if (s == "both") r.mode = RunMode::both;
    else throw ConfigError("run.mode", "expected \"kushner\", \"zakai\" or \"both\"");
  });
  optional(j, "record_stride", [&](const json& v) { r.record_stride = read_integer(v, "run.record_stride"); });
  if (r.record_stride < 1) throw ConfigError("run.record_stride", "must be >= 1");
  optional(j, "snapshot_stride", [&](const json& v) { r.snapshot_stride = read_integer(v, "run.snapshot_stride"); });
  if (r.snapshot_stride < 0) throw ConfigError("run.snapshot_stride", "must be >= 0");
  optional(j, "threads", [&](const json& v) {
    const long t = read_integer(v, "run.threads");
    if (t < 0) throw ConfigError("run.threads", "must be >= 0");
    r.threads = unsigned(t);
  });
  optional(j, "initial_state", [&](const json& v) {
    if (v.is_string()) {
      r.initial_state = v.get<std::string>();
      if (r.initial_state != "ground" && r.initial_state != "excited" && r.initial_state != "mixed") {
        throw ConfigError("run.initial_state", "expected \"ground\", \"excited\", \"mixed\" or a matrix");
      }
    } else {
      r.initial_state = "matrix";
      r.initial_matrix = read_matrix(v, "run.initial_state", d);
      try {
        validate_state(r.initial_matrix, d);
      } catch (const Error& e) {
        throw ConfigError("run.initial_state", e.what());
      }
    }
  });
  if (j.contains("observables")) {
    const auto& obs = j.at("observables");
    if (!obs.is_array()) throw ConfigError("run.observables", "expected an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const auto path = "run.observables[" + std::to_string(i) + "]";
      r.observables.push_back(read_observable(obs[i], path, d));
      if (!seen.insert(r.observables.back().name).second) throw ConfigError(path, "duplicate name");
    }
  } else if (d == 2) {
    r.observables.push_back({"sz", true, named_observable("sz")});
  }
  return r;
}

OutputSection read_output(const json& j) {
  require_object(j, "output");
  reject_unknown(j, "output", {"directory", "formats", "trajectory_csv_limit"});
  OutputSection o;
  optional(j, "directory", [&](const json& v) {
    if (!v.is_string()) throw ConfigError("output.directory", "expected a string");
    o.directory = v.get<std::string>();
  });
  optional(j, "formats", [&](const json& v) {
    if (!v.is_array()) throw ConfigError("output.formats", "expected an array");
    o.formats.clear();
    for (const auto& f : v) {
      if (!f.is_string() || (f != "csv" && f != "json")) {
        throw ConfigError("output.formats", "entries must be \"csv\" or \"json\"");
      }
      o.formats.push_back(f.get<std::string>());
    }
  });
  optional(j, "trajectory_csv_limit", [&](const json& v) {
    o.trajectory_csv_limit = read_integer(v, "output.trajectory_csv_limit");
  });
  if (o.trajectory_csv_limit < 0) throw ConfigError("output.trajectory_csv_limit", "must be >= 0");
  return o;
}

LambdaSection read_lambda(const json& j) {
  require_object(j, "lambda_curve");
  reject_unknown(j, "lambda_curve", {"taus", "theta_points", "r"});
  LambdaSection l;
  optional(j, "taus", [&](const json& v) {
    if (!v.is_array() || v.empty()) throw ConfigError("lambda_curve.taus", "expected a non-empty array");
    l.taus.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto path = "lambda_curve.taus[" + std::to_string(i) + "]";
      const double t = read_number(v[i], path);
      if (t < 0.5 || t > 1.0) throw ConfigError(path, "tau must lie in [0.5, 1]");
      l.taus.push_back(t);
    }
  });
  optional(j, "theta_points", [&](const json& v) {
    l.theta_points = int(read_integer(v, "lambda_curve.theta_points"));
  });
  if (l.theta_points < 1) throw ConfigError("lambda_curve.theta_points", "must be >= 1");
  optional(j, "r", [&](const json& v) { l.r = read_number(v, "lambda_curve.r"); });
  if (!(l.r > 0)) throw ConfigError("lambda_curve.r", "must be positive");
  return l;
}

// --- writing --------------------------------------------------------------

json complex_json(cdouble z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const MatrixXc& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

bool same_matrix(const MatrixXc& a, const MatrixXc& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

const char* to_string(BathKind kind) {
  switch (kind) {
    case BathKind::nm: return "nm";
    case BathKind::bv: return "bv";
    case BathKind::hkkr: return "hkkr";
  }
  return "?";
}

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kushner: return "kushner";
    case RunMode::zakai: return "zakai";
    case RunMode::both: return "both";
  }
  return "?";
}

MatrixXc named_observable(const std::string& name) {
  MatrixXc m = MatrixXc::Zero(2, 2);
  if (name == "sx") {
    m(0, 1) = m(1, 0) = 1;
  } else if (name == "sy") {
    m(0, 1) = cdouble(0, -1);
    m(1, 0) = cdouble(0, 1);
  } else if (name == "sz") {
    m(0, 0) = -1;
    m(1, 1) = 1;
  } else if (name == "sm") {
    m(0, 1) = 1;
  } else if (name == "sp") {
    m(1, 0) = 1;
  } else {
    throw ValidationError("unknown observable \"" + name + "\" (expected sx, sy, sz, sm or sp)");
  }
  return m;
}

RunConfig default_config() {
  RunConfig c;
  c.bath.kind = BathKind::nm;
  c.bath.n = 1.0;
  c.bath.m = std::polar(0.8, std::numbers::pi / 4);
  c.d = 2;
  c.H = 0.5 * named_observable("sz");
  c.L = named_observable("sm");
  c.run.observables = {{"sz", true, named_observable("sz")}};
  return c;
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", "JSON syntax error at " + line_column(text, e.byte > 0 ? e.byte - 1 : 0) +
                              ": " + e.what());
  }
  require_object(root, "(root)");
  reject_unknown(root, "", {"bath", "system", "run", "output", "lambda_curve"});

  RunConfig c;
  if (!root.contains("bath")) throw ConfigError("bath", "missing");
  c.bath = read_bath(root.at("bath"));

  if (!root.contains("system")) throw ConfigError("system", "missing");
  const auto& sys = require_object(root.at("system"), "system");
  reject_unknown(sys, "system", {"d", "H", "L"});
  if (!sys.contains("d")) throw ConfigError("system.d", "missing");
  c.d = read_integer(sys.at("d"), "system.d");
  if (c.d < 1 || c.d > 64) throw ConfigError("system.d", "must lie in [1, 64]");
  c.H = sys.contains("H") ? read_matrix(sys.at("H"), "system.H", c.d) : MatrixXc::Zero(c.d, c.d);
  if (!sys.contains("L")) throw ConfigError("system.L", "missing");
  c.L = read_matrix(sys.at("L"), "system.L", c.d);
  if (hermitian_residual(c.H) > 1e-10) throw ConfigError("system.H", "must be Hermitian (within 1e-10)");

  c.run = read_run(root.contains("run") ? root.at("run") : json::object(), c.d);
  if (root.contains("output")) c.output = read_output(root.at("output"));
  if (root.contains("lambda_curve")) c.lambda = read_lambda(root.at("lambda_curve"));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
  json root;
  json bath;
  switch (c.bath.kind) {
    case BathKind::bv:
      bath["bv"] = {{"r", c.bath.r}, {"rho", c.bath.rho}, {"theta", c.bath.theta}};
      break;
    case BathKind::nm:
    case BathKind::hkkr:
      bath[to_string(c.bath.kind)] = {{"n", c.bath.n}, {"m", complex_json(c.bath.m)}};
      break;
  }
  root["bath"] = bath;
  root["system"] = {{"d", c.d}, {"H", matrix_json(c.H)}, {"L", matrix_json(c.L)}};

  json obs = json::array();
  for (const auto& o : c.run.observables) {
    if (o.named) {
      obs.push_back(o.name);
    } else {
      obs.push_back({{"name", o.name}, {"matrix", matrix_json(o.matrix)}});
    }
  }
  json run = {{"T", c.run.duration},
              {"dt", c.run.dt},
              {"trajectories", c.run.trajectories},
              {"seed", c.run.seed},
              {"mode", to_string(c.run.mode)},
              {"observables", obs},
              {"record_stride", c.run.record_stride},
              {"snapshot_stride", c.run.snapshot_stride},
              {"threads", c.run.threads}};
  if (c.run.initial_state == "matrix") {
    run["initial_state"] = matrix_json(c.run.initial_matrix);
  } else {
    run["initial_state"] = c.run.initial_state;
  }
  root["run"] = run;
  root["output"] = {{"directory", c.output.directory},
                    {"formats", c.output.formats},
                    {"trajectory_csv_limit", c.output.trajectory_csv_limit}};
  root["lambda_curve"] = {{"taus", c.lambda.taus},
                          {"theta_points", c.lambda.theta_points},
                          {"r", c.lambda.r}};
  return root.dump(2) + "\n";
}

bool same_config(const RunConfig& a, const RunConfig& b) {
  const auto& x = a.bath;
  const auto& y = b.bath;
  if (x.kind != y.kind || x.n != y.n || x.m != y.m || x.r != y.r || x.rho != y.rho || x.theta != y.theta) {
    return false;
  }
  if (a.d != b.d || !same_matrix(a.H, b.H) || !same_matrix(a.L, b.L)) return false;
  const auto& r = a.run;
  const auto& s = b.run;
  if (r.duration != s.duration || r.dt != s.dt || r.trajectories != s.trajectories || r.seed != s.seed ||
      r.mode != s.mode || r.record_stride != s.record_stride || r.snapshot_stride != s.snapshot_stride ||
      r.threads != s.threads || r.initial_state != s.initial_state ||
      !same_matrix(r.initial_matrix, s.initial_matrix) || r.observables.size() != s.observables.size()) {
    return false;
  }
  for (std::size_t i = 0; i < r.observables.size(); ++i) {
    const auto& o = r.observables[i];
    const auto& p = s.observables[i];
    if (o.name != p.name || o.named != p.named || !same_matrix(o.matrix, p.matrix)) return false;
  }
  return a.output.directory == b.output.directory && a.output.formats == b.output.formats &&
         a.output.trajectory_csv_limit == b.output.trajectory_csv_limit &&
         a.lambda.taus == b.lambda.taus && a.lambda.theta_points == b.lambda.theta_points &&
         a.lambda.r == b.lambda.r;
}

SqueezingParams<double> bath_params(const RunConfig& cfg) {
  if (cfg.bath.kind == BathKind::bv) return balanced_marginal(balanced_representation(cfg));
  return {cfg.bath.n, cfg.bath.m};
}

BalancedCoeffs<double> balanced_representation(const RunConfig& cfg) {
  const auto& b = cfg.bath;
  switch (b.kind) {
    case BathKind::bv:
      return balanced_from_bv(b.r, b.rho, b.theta);
    case BathKind::hkkr:
      return balanced_from_hkkr(b.n, b.m);
    case BathKind::nm: {
      const auto p = bv_params_for(SqueezingParams<double>{b.n, b.m});
      return balanced_from_bv(p.r, p.rho, p.theta);
    }
  }
  throw ConfigError("bath", "unknown representation");
}

SystemModel<double> system_model(const RunConfig& cfg) {
  return {cfg.H, cfg.L, bath_params(cfg)};
}

MatrixXc initial_state(const RunConfig& cfg) {
  const long d = cfg.d;
  const auto& s = cfg.run.initial_state;
  if (s == "matrix") return cfg.run.initial_matrix;
  if (s == "mixed") return MatrixXc::Identity(d, d) / double(d);
  MatrixXc rho = MatrixXc::Zero(d, d);
  if (s == "excited") {
    rho(d - 1, d - 1) = 1;
  } else {
    rho(0, 0) = 1;
  }
  return rho;
}

std::vector<Observable> observables(const RunConfig& cfg) {
  std::vector<Observable> out;
  for (const auto& o : cfg.run.observables) {
    if (hermitian_residual(o.matrix) <= 1e-12) {
      out.push_back({o.name, o.matrix});
    } else {
      out.push_back({o.name + ".re", 0.5 * (o.matrix + o.matrix.adjoint())});
      out.push_back({o.name + ".im", cdouble(0, -0.5) * (o.matrix - o.matrix.adjoint())});
    }
  }
  return out;
}

}  // namespace sqf
