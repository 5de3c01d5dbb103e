#include "holo/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "holo/errors.hpp"

namespace holo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string &path, const std::string &what) {
  throw ConfigError(path + ": " + what);
}

const json *find(const json &obj, const std::string &key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json &require(const json &obj, const std::string &key,
                    const std::string &path) {
  const json *v = find(obj, key);
  if (!v)
    fail(path + "." + key, "missing required key");
  return *v;
}

void expect_object(const json &v, const std::string &path) {
  if (!v.is_object())
    fail(path, "expected an object");
}

double as_number(const json &v, const std::string &path) {
  if (!v.is_number())
    fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d))
    fail(path, "expected a finite number");
  return d;
}

int as_int(const json &v, const std::string &path) {
  if (!v.is_number_integer())
    fail(path, "expected an integer");
  return v.get<int>();
}

bool as_bool(const json &v, const std::string &path) {
  if (!v.is_boolean())
    fail(path, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json &v, const std::string &path) {
  if (!v.is_string())
    fail(path, "expected a string");
  return v.get<std::string>();
}

Vec3 as_vec3(const json &v, const std::string &path) {
  if (!v.is_array() || v.size() != 3)
    fail(path, "expected an array of 3 numbers");
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
          as_number(v[2], path + "[2]")};
}

json vec3_json(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }

void check_exterior(const Vec3 &p, const SceneConfig &scene,
                    const std::string &path) {
  if (norm(p - scene.center) < scene.r_min)
    fail(path, "point lies inside the exclusion ball (|p - center| < r_min)");
}

// Every point the recovery queries lies on start + s dir with s >= the
// smallest grid radius.
void check_sampled_segment(const RayGeometry &ray, const PlanConfig &plan,
                           const SceneConfig &scene) {
  const Vec3 d = ray.direction * (1.0 / norm(ray.direction));
  const double s_min = plan.s_grid.front();
  const double s_near = std::max(s_min, dot(scene.center - ray.start, d));
  if (norm(ray.start + s_near * d - scene.center) < scene.r_min)
    fail("geometry.ray", "sampled ray points enter the exclusion ball");
}

SceneConfig parse_scene(const json &doc) {
  const std::string path = "scene";
  const json &v = require(doc, "scene", "");
  expect_object(v, path);
  SceneConfig scene;
  if (const json *k = find(v, "wave_vector"))
    scene.wave_vector = as_vec3(*k, path + ".wave_vector");
  if (norm(scene.wave_vector) <= 0.0)
    fail(path + ".wave_vector", "must be nonzero");
  if (const json *c = find(v, "center"))
    scene.center = as_vec3(*c, path + ".center");
  if (const json *r = find(v, "r_min"))
    scene.r_min = as_number(*r, path + ".r_min");
  if (!(scene.r_min > 0.0))
    fail(path + ".r_min", "must be positive");

  const json &modes = require(v, "multipoles", path);
  if (!modes.is_array())
    fail(path + ".multipoles", "expected an array of [l, m, re, im] tuples");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string mp = path + ".multipoles[" + std::to_string(i) + "]";
    const json &t = modes[i];
    if (!t.is_array() || t.size() != 4)
      fail(mp, "expected [l, m, re, im]");
    ModeEntry e{as_int(t[0], mp + "[0]"), as_int(t[1], mp + "[1]"),
                as_number(t[2], mp + "[2]"), as_number(t[3], mp + "[3]")};
    if (e.l < 0 || std::abs(e.m) > e.l)
      fail(mp, "invalid mode (l=" + std::to_string(e.l) +
                   ", m=" + std::to_string(e.m) + "): need 0 <= |m| <= l");
    if (e.l > kMaxSupportedDegree)
      fail(mp, "degree " + std::to_string(e.l) + " exceeds " +
                   std::to_string(kMaxSupportedDegree));
    scene.multipoles.push_back(e);
  }
  return scene;
}

GeometryConfig parse_geometry(const json &doc, const SceneConfig &scene) {
  const std::string path = "geometry";
  const json &v = require(doc, "geometry", "");
  expect_object(v, path);
  GeometryConfig g;
  const json *ray = find(v, "ray");
  const json *plane = find(v, "plane");
  if ((ray != nullptr) == (plane != nullptr))
    fail(path, "exactly one of 'ray' or 'plane' is required");
  if (ray) {
    const std::string rp = path + ".ray";
    expect_object(*ray, rp);
    RayGeometry r;
    r.start = as_vec3(require(*ray, "start", rp), rp + ".start");
    r.direction = as_vec3(require(*ray, "direction", rp), rp + ".direction");
    if (norm(r.direction) <= 0.0)
      fail(rp + ".direction", "must be nonzero");
    // The source center itself is the natural frame origin and is allowed;
    // the sampled segment is checked once the plan is known.
    if (r.start != scene.center)
      check_exterior(r.start, scene, rp + ".start");
    g.ray = r;
  } else {
    const std::string pp = path + ".plane";
    expect_object(*plane, pp);
    PlaneGeometry p;
    p.point = as_vec3(require(*plane, "point", pp), pp + ".point");
    p.u = as_vec3(require(*plane, "u", pp), pp + ".u");
    p.v = as_vec3(require(*plane, "v", pp), pp + ".v");
    try {
      Plane{p.point, p.u, p.v}.validate();
    } catch (const Error &e) {
      fail(pp, e.what());
    }
    check_exterior(p.point, scene, pp + ".point");
    const json &targets = require(*plane, "targets", pp);
    if (!targets.is_array())
      fail(pp + ".targets", "expected an array of points");
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const std::string tp = pp + ".targets[" + std::to_string(i) + "]";
      p.targets.push_back(as_vec3(targets[i], tp));
      check_exterior(p.targets.back(), scene, tp);
    }
    if (const json *t = find(*plane, "tolerance"))
      p.tolerance = as_number(*t, pp + ".tolerance");
    if (!(p.tolerance > 0.0))
      fail(pp + ".tolerance", "must be positive");
    g.plane = p;
  }
  return g;
}

PlanConfig parse_plan(const json &doc) {
  PlanConfig plan;
  const json *v = find(doc, "plan");
  if (!v)
    return plan;
  const std::string path = "plan";
  expect_object(*v, path);
  if (const json *g = find(*v, "s_grid")) {
    if (!g->is_array() || g->empty())
      fail(path + ".s_grid", "expected a nonempty array of radii");
    plan.s_grid.clear();
    for (std::size_t i = 0; i < g->size(); ++i) {
      const std::string sp = path + ".s_grid[" + std::to_string(i) + "]";
      plan.s_grid.push_back(as_number((*g)[i], sp));
      if (!(plan.s_grid.back() > 0.0))
        fail(sp, "must be positive");
      if (i > 0 && !(plan.s_grid[i] > plan.s_grid[i - 1]))
        fail(sp, "s_grid must be strictly ascending");
    }
  }
  if (const json *t = find(*v, "tau")) {
    if (t->is_string()) {
      if (t->get<std::string>() != "auto")
        fail(path + ".tau", "expected \"auto\" or a positive number");
    } else {
      plan.tau = as_number(*t, path + ".tau");
      if (!(*plan.tau > 0.0))
        fail(path + ".tau", "must be positive");
    }
  }
  if (const json *o = find(*v, "order")) {
    plan.order = as_int(*o, path + ".order");
    if (plan.order < 1)
      fail(path + ".order", "must be >= 1");
  }
  if (const json *r = find(*v, "richardson"))
    plan.richardson = as_bool(*r, path + ".richardson");
  if (const json *a = find(*v, "align_phase"))
    plan.align_phase = as_bool(*a, path + ".align_phase");
  if (const json *t = find(*v, "tolerance")) {
    plan.tolerance = as_number(*t, path + ".tolerance");
    if (!(plan.tolerance > 0.0))
      fail(path + ".tolerance", "must be positive");
  }
  return plan;
}

std::optional<NoiseConfig> parse_noise(const json &doc) {
  const json *v = find(doc, "noise");
  if (!v || v->is_null())
    return std::nullopt;
  const std::string path = "noise";
  expect_object(*v, path);
  NoiseConfig n;
  n.amplitude = as_number(require(*v, "amplitude", path), path + ".amplitude");
  if (!(n.amplitude >= 0.0 && n.amplitude < 1.0))
    fail(path + ".amplitude", "must lie in [0, 1)");
  if (const json *s = find(*v, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && *s >= 0))
      fail(path + ".seed", "expected a nonnegative integer");
    n.seed = s->get<std::uint64_t>();
  }
  return n;
}

OutputConfig parse_output(const json &doc) {
  OutputConfig out;
  const json *v = find(doc, "output");
  if (!v)
    return out;
  expect_object(*v, "output");
  if (const json *d = find(*v, "directory"))
    out.directory = as_string(*d, "output.directory");
  if (const json *f = find(*v, "format"))
    out.format = as_string(*f, "output.format");
  if (out.format != "csv")
    fail("output.format", "unsupported format '" + out.format + "' (csv)");
  return out;
}

CheckConfig parse_checks(const json &doc) {
  CheckConfig c;
  const json *v = find(doc, "checks");
  if (!v)
    return c;
  const std::string path = "checks";
  expect_object(*v, path);
  if (const json *e = find(*v, "max_abs_error"))
    c.max_abs_error = as_number(*e, path + ".max_abs_error");
  if (const json *lo = find(*v, "slope_min"))
    c.slope_min = as_number(*lo, path + ".slope_min");
  if (const json *hi = find(*v, "slope_max"))
    c.slope_max = as_number(*hi, path + ".slope_max");
  if (const json *lv = find(*v, "slope_levels")) {
    if (!lv->is_array())
      fail(path + ".slope_levels", "expected an array of levels");
    for (std::size_t i = 0; i < lv->size(); ++i)
      c.slope_levels.push_back(
          as_int((*lv)[i], path + ".slope_levels[" + std::to_string(i) + "]"));
  }
  return c;
}

} // namespace

WaveVector ExperimentConfig::wave() const { return WaveVector(scene.wave_vector); }

RadiatingField ExperimentConfig::field() const {
  int degree = kDefaultMaxDegree;
  for (const auto &e : scene.multipoles)
    degree = std::max(degree, e.l);
  MultipoleSpectrum spectrum(degree);
  for (const auto &e : scene.multipoles)
    spectrum.add(e.l, e.m, {e.re, e.im});
  return RadiatingField(std::move(spectrum), scene.center, scene.r_min);
}

SamplingPlan ExperimentConfig::sampling_plan() const {
  SamplingPlan p;
  p.s_grid = plan.s_grid;
  p.tau = plan.tau;
  p.order = plan.order;
  p.richardson = plan.richardson;
  p.align_phase = plan.align_phase;
  p.tolerance = plan.tolerance;
  return p;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("document: malformed JSON: ") + e.what());
  }
  expect_object(doc, "document");

  ExperimentConfig cfg;
  if (const json *id = find(doc, "id"))
    cfg.id = as_string(*id, "id");
  if (cfg.id.empty() ||
      cfg.id.find_first_of("/\\ ,\"") != std::string::npos)
    fail("id", "must be nonempty without '/', '\\\\', spaces, commas or quotes");
  cfg.scene = parse_scene(doc);
  cfg.geometry = parse_geometry(doc, cfg.scene);
  cfg.plan = parse_plan(doc);
  if (cfg.geometry.ray)
    check_sampled_segment(*cfg.geometry.ray, cfg.plan, cfg.scene);
  cfg.noise = parse_noise(doc);
  cfg.output = parse_output(doc);
  cfg.checks = parse_checks(doc);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig &cfg) {
  json doc;
  doc["id"] = cfg.id;

  json modes = json::array();
  for (const auto &e : cfg.scene.multipoles)
    modes.push_back(json::array({e.l, e.m, e.re, e.im}));
  doc["scene"] = {{"wave_vector", vec3_json(cfg.scene.wave_vector)},
                  {"multipoles", modes},
                  {"center", vec3_json(cfg.scene.center)},
                  {"r_min", cfg.scene.r_min}};

  if (cfg.geometry.ray) {
    doc["geometry"]["ray"] = {{"start", vec3_json(cfg.geometry.ray->start)},
                              {"direction",
                               vec3_json(cfg.geometry.ray->direction)}};
  } else if (cfg.geometry.plane) {
    const auto &p = *cfg.geometry.plane;
    json targets = json::array();
    for (const auto &t : p.targets)
      targets.push_back(vec3_json(t));
    doc["geometry"]["plane"] = {{"point", vec3_json(p.point)},
                                {"u", vec3_json(p.u)},
                                {"v", vec3_json(p.v)},
                                {"targets", targets},
                                {"tolerance", p.tolerance}};
  }

  json plan = {{"s_grid", cfg.plan.s_grid},
               {"order", cfg.plan.order},
               {"richardson", cfg.plan.richardson},
               {"align_phase", cfg.plan.align_phase},
               {"tolerance", cfg.plan.tolerance}};
  if (cfg.plan.tau)
    plan["tau"] = *cfg.plan.tau;
  else
    plan["tau"] = "auto";
  doc["plan"] = plan;

  if (cfg.noise)
    doc["noise"] = {{"amplitude", cfg.noise->amplitude},
                    {"seed", cfg.noise->seed}};
  doc["output"] = {{"directory", cfg.output.directory},
                   {"format", cfg.output.format}};

  json checks = json::object();
  if (cfg.checks.max_abs_error)
    checks["max_abs_error"] = *cfg.checks.max_abs_error;
  if (cfg.checks.slope_min)
    checks["slope_min"] = *cfg.checks.slope_min;
  if (cfg.checks.slope_max)
    checks["slope_max"] = *cfg.checks.slope_max;
  if (!cfg.checks.slope_levels.empty())
    checks["slope_levels"] = cfg.checks.slope_levels;
  doc["checks"] = checks;
  return doc.dump(2);
}

} // namespace holo
