#include "hicu/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace hicu {

using nlohmann::json;

namespace {

// Strict view over a JSON object: every key must be consumed or finish() throws.
class Fields {
public:
  Fields(json const &j, std::string where) : j_{j}, where_{std::move(where)} {
    if (!j.is_object())
      throw ConfigError(where_ + ": expected an object");
  }

  template <typename T> std::optional<T> opt(std::string const &key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null())
      return std::nullopt;
    try {
      return it->get<T>();
    } catch (json::exception const &e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }
  template <typename T> T get(std::string const &key, T fallback) { return opt<T>(key).value_or(fallback); }
  template <typename T> T req(std::string const &key) {
    auto v = opt<T>(key);
    if (!v)
      throw ConfigError(where_ + ": missing required key '" + key + "'");
    return *v;
  }
  json const *sub(std::string const &key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
  }
  std::string const &where() const { return where_; }

private:
  json const &j_;
  std::string where_;
  std::set<std::string> seen_;
};

PhantomSpec parse_phantom(json const &j, std::uint64_t seed) {
  Fields f(j, "phantom");
  PhantomSpec s;
  s.nx = f.get<Index>("nx", s.nx);
  s.ny = f.get<Index>("ny", s.ny);
  s.nz = f.get<Index>("nz", s.nz);
  s.nt = f.get<Index>("nt", s.nt);
  s.ncoils = f.get<Index>("ncoils", s.ncoils);
  s.sens_kspace_order = f.get<Index>("sens_kspace_order", s.sens_kspace_order);
  s.kernel_extent = f.get<Index>("kernel_extent", s.kernel_extent);
  s.seed = f.get<std::uint64_t>("seed", seed);
  if (auto const *els = f.sub("ellipses")) {
    if (!els->is_array())
      throw ConfigError("phantom.ellipses: expected an array");
    s.ellipses.clear();
    for (auto const &e : *els) {
      Fields g(e, "phantom.ellipses[]");
      Ellipse el;
      el.cx = g.get<double>("cx", el.cx);
      el.cy = g.get<double>("cy", el.cy);
      el.ax = g.get<double>("ax", el.ax);
      el.ay = g.get<double>("ay", el.ay);
      el.angle_deg = g.get<double>("angle_deg", el.angle_deg);
      el.intensity = g.get<double>("intensity", el.intensity);
      g.finish();
      s.ellipses.push_back(el);
    }
  }
  f.finish();
  return s;
}

MaskPattern parse_pattern(std::string const &name) {
  if (name == "vd_1d")
    return MaskPattern::VariableDensity1D;
  if (name == "random_2d")
    return MaskPattern::Random2D;
  if (name == "vd_t")
    return MaskPattern::VariableDensityTime;
  throw ConfigError("mask.pattern: unknown pattern '" + name + "'");
}

RegionSpec parse_region(json const &j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "full")
      throw ConfigError("stage.region: expected \"full\" or an object");
    return RegionSpec::full();
  }
  Fields f(j, "stage.region");
  auto frac = f.opt<std::vector<double>>("fraction");
  auto win = f.opt<Dims>("window");
  f.finish();
  if (frac && win)
    throw ConfigError("stage.region: give either fraction or window");
  if (frac)
    return RegionSpec::fractions(*frac);
  if (win)
    return RegionSpec::windows(*win);
  return RegionSpec::full();
}

SolverSchedule parse_schedule(json const &j, std::uint64_t seed, int &power_iterations, bool &track_tail) {
  Fields f(j, "schedule");
  SolverSchedule s;
  s.rank = f.req<Index>("rank");
  s.circular_axes = f.get<std::vector<Index>>("circular_axes", {});
  s.seed = f.get<std::uint64_t>("seed", seed);
  power_iterations = f.get<int>("power_iterations", 0);
  track_tail = f.get<bool>("track_tail_energy", false);
  if (auto const *dc = f.sub("dc")) {
    if (dc->is_string()) {
      if (dc->get<std::string>() != "hard")
        throw ConfigError("schedule.dc: expected \"hard\" or {\"mode\": \"soft\", \"lambda\": ...}");
    } else {
      Fields g(*dc, "schedule.dc");
      auto const mode = g.req<std::string>("mode");
      if (mode == "soft") {
        s.dc_mode = DcMode::Soft;
        s.lambda = g.req<double>("lambda");
      } else if (mode != "hard")
        throw ConfigError("schedule.dc.mode: unknown mode '" + mode + "'");
      g.finish();
    }
  }
  auto const *stages = f.sub("stages");
  if (!stages || !stages->is_array() || stages->empty())
    throw ConfigError("schedule.stages: expected a non-empty array");
  for (auto const &st : *stages) {
    Fields g(st, "schedule.stages[]");
    Stage stage;
    if (auto const *r = g.sub("region"))
      stage.region = parse_region(*r);
    stage.p = g.req<Index>("p");
    stage.G = g.req<Index>("G");
    stage.iterations = g.req<Index>("iterations");
    g.finish();
    s.stages.push_back(stage);
  }
  f.finish();
  return s;
}

std::filesystem::path resolve(std::filesystem::path const &base, std::string const &p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

} // namespace

KernelMask KernelConfig::build() const {
  return ellipsoid ? KernelMask::ellipsoid(extents, spatial_axes) : KernelMask::rectangular(extents);
}

Dims RunConfig::phantom_dims() const {
  if (!phantom)
    throw ConfigError("config has no phantom section");
  Dims d{phantom->nx, phantom->ny};
  if (phantom->nz > 0)
    d.push_back(phantom->nz);
  if (phantom->nt > 0)
    d.push_back(phantom->nt);
  d.push_back(phantom->ncoils);
  return d;
}

void RunConfig::override_seed(std::uint64_t s) {
  seed = s;
  if (phantom)
    phantom->seed = s;
  if (mask)
    mask->seed = s;
  if (schedule)
    schedule->seed = s;
}

RunConfig parse_run_config(json const &doc, std::filesystem::path const &base_dir) {
  Fields f(doc, "config");
  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.seed = f.get<std::uint64_t>("seed", cfg.seed);
  if (auto const *p = f.sub("phantom")) {
    // noise is a phantom-level option but not part of PhantomSpec
    json copy = *p;
    if (copy.contains("noise_snr_db")) {
      if (!copy["noise_snr_db"].is_null())
        cfg.noise_snr_db = copy["noise_snr_db"].get<double>();
      copy.erase("noise_snr_db");
    }
    cfg.phantom = parse_phantom(copy, cfg.seed);
  }
  if (auto const *m = f.sub("mask")) {
    Fields g(*m, "mask");
    MaskSpec ms;
    ms.pattern = parse_pattern(g.get<std::string>("pattern", "vd_1d"));
    ms.R = g.req<double>("R");
    ms.acs = g.get<Dims>("acs", {});
    ms.seed = g.get<std::uint64_t>("seed", cfg.seed);
    ms.decay = g.get<double>("decay", ms.decay);
    ms.sigma_fraction = g.get<double>("sigma_fraction", ms.sigma_fraction);
    auto phase = g.opt<std::vector<Index>>("phase_axes");
    auto time = g.opt<Index>("time_axis");
    if (phase || time) {
      MaskAxes ax;
      ax.phase = phase.value_or(std::vector<Index>{});
      ax.time = time.value_or(-1);
      cfg.mask_axes = ax;
    }
    cfg.mask_dims = g.opt<Dims>("dims");
    g.finish();
    cfg.mask = ms;
  }
  if (auto const *k = f.sub("kernel")) {
    KernelConfig kc;
    if (k->is_array()) {
      kc.extents = k->get<Dims>();
    } else {
      Fields g(*k, "kernel");
      kc.extents = g.req<Dims>("extents");
      auto const support = g.get<std::string>("support", "rect");
      if (support == "ellipsoid")
        kc.ellipsoid = true;
      else if (support != "rect")
        throw ConfigError("kernel.support: expected rect or ellipsoid");
      kc.spatial_axes = g.get<Index>("spatial_axes", kc.spatial_axes);
      g.finish();
    }
    cfg.kernel = kc;
  }
  if (auto const *s = f.sub("schedule"))
    cfg.schedule = parse_schedule(*s, cfg.seed, cfg.power_iterations, cfg.track_tail_energy);
  if (auto const *m = f.sub("metrics")) {
    Fields g(*m, "metrics");
    cfg.metrics.ser = g.get<bool>("ser", true);
    cfg.metrics.hfen = g.get<bool>("hfen", true);
    cfg.metrics.ssim = g.get<bool>("ssim", true);
    cfg.metrics.ssos = g.get<bool>("ssos", true);
    cfg.metrics.spatial_axes = g.get<std::vector<Index>>("spatial_axes", {});
    g.finish();
  }
  if (auto const *in = f.sub("inputs")) {
    Fields g(*in, "inputs");
    if (auto p = g.opt<std::string>("kspace"))
      cfg.inputs.kspace = resolve(base_dir, *p);
    if (auto p = g.opt<std::string>("mask"))
      cfg.inputs.mask = resolve(base_dir, *p);
    if (auto p = g.opt<std::string>("reference"))
      cfg.inputs.reference = resolve(base_dir, *p);
    g.finish();
  }
  if (auto const *out = f.sub("outputs")) {
    Fields g(*out, "outputs");
    auto &o = cfg.outputs;
    o.kspace = g.get<std::string>("kspace", o.kspace);
    o.coil_images = g.get<std::string>("coil_images", o.coil_images);
    o.phantom_spec = g.get<std::string>("phantom_spec", o.phantom_spec);
    o.mask = g.get<std::string>("mask", o.mask);
    o.recon = g.get<std::string>("recon", o.recon);
    o.report = g.get<std::string>("report", o.report);
    g.finish();
  }
  f.finish();
  return cfg;
}

RunConfig load_run_config(std::filesystem::path const &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (json::parse_error const &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  auto base = path.parent_path();
  if (base.empty())
    base = ".";
  return parse_run_config(doc, base);
}

std::string mask_pattern_name(MaskPattern p) {
  switch (p) {
  case MaskPattern::VariableDensity1D:
    return "vd_1d";
  case MaskPattern::Random2D:
    return "random_2d";
  case MaskPattern::VariableDensityTime:
    return "vd_t";
  }
  return "?";
}

json to_json(PhantomSpec const &s) {
  json els = json::array();
  for (auto const &e : s.ellipses)
    els.push_back({{"cx", e.cx}, {"cy", e.cy}, {"ax", e.ax}, {"ay", e.ay}, {"angle_deg", e.angle_deg},
                   {"intensity", e.intensity}});
  return {{"nx", s.nx},         {"ny", s.ny},
          {"nz", s.nz},         {"nt", s.nt},
          {"ncoils", s.ncoils}, {"sens_kspace_order", s.sens_kspace_order},
          {"kernel_extent", s.kernel_extent}, {"seed", s.seed},
          {"ellipses", els}};
}

json to_json(MaskSpec const &s) {
  return {{"pattern", mask_pattern_name(s.pattern)}, {"R", s.R}, {"acs", s.acs}, {"seed", s.seed},
          {"decay", s.decay}, {"sigma_fraction", s.sigma_fraction}};
}

json to_json(SolverSchedule const &s) {
  json stages = json::array();
  for (auto const &st : s.stages) {
    json region = "full";
    if (st.region.kind == RegionSpec::Kind::Fraction)
      region = {{"fraction", st.region.fraction}};
    else if (st.region.kind == RegionSpec::Kind::Window)
      region = {{"window", st.region.window}};
    stages.push_back({{"region", region}, {"p", st.p}, {"G", st.G}, {"iterations", st.iterations}});
  }
  json dc = "hard";
  if (s.dc_mode == DcMode::Soft)
    dc = {{"mode", "soft"}, {"lambda", s.lambda}};
  return {{"rank", s.rank}, {"circular_axes", s.circular_axes}, {"seed", s.seed}, {"dc", dc}, {"stages", stages}};
}

namespace {

json db_value(std::optional<double> v) {
  if (!v)
    return nullptr;
  if (std::isinf(*v))
    return *v > 0 ? "+inf" : "-inf";
  return *v;
}

json counts_json(ConvCounts const &c) {
  return {{"forward", c.forward}, {"adjoint", c.adjoint}, {"scatter", c.scatter}};
}

} // namespace

json to_json(ReconReport const &r, bool include_timing) {
  json its = json::array();
  for (auto const &it : r.iterations) {
    json j = {{"stage", it.stage},
              {"iteration", it.iteration},
              {"objective", it.objective},
              {"tail_energy", it.tail_energy ? json(*it.tail_energy) : json(nullptr)},
              {"ser_db", db_value(it.ser_db)},
              {"counts", counts_json(it.counts)},
              {"rsvd_peak_aux_values", it.rsvd_peak_aux_values},
              {"region_size", it.region_size},
              {"skipped_steps", it.skipped_steps}};
    if (include_timing)
      j["seconds"] = it.seconds;
    its.push_back(j);
  }
  json steps = json::array();
  for (auto const &st : r.steps) {
    json j = {{"stage", st.stage},
              {"iteration", st.iteration},
              {"step", st.step},
              {"objective_before", st.objective_before},
              {"objective_after", st.objective_after},
              {"eta", st.eta},
              {"skipped", st.skipped},
              {"ser_db", db_value(st.ser_db)}};
    if (include_timing)
      j["seconds"] = st.seconds;
    steps.push_back(j);
  }
  return {{"iterations", its},
          {"steps", steps},
          {"total_counts", counts_json(r.total_counts)},
          {"peak_aux_values", r.peak_aux_values},
          {"largest_region", r.largest_region},
          {"sketch_width", r.sketch_width},
          {"skipped_steps", r.skipped_steps}};
}

} // namespace hicu
