#include "hicu/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "hicu/array_file.hpp"
#include "hicu/metrics.hpp"

namespace hicu {

namespace fs = std::filesystem;
using array_file::read_complex;
using array_file::read_mask;

namespace {

void write_json(fs::path const &path, nlohmann::json const &j) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out)
    throw IoError("write failed: " + path.string());
}

fs::path prepare_dir(fs::path const &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

fs::path existing(fs::path const &p, char const *what) {
  if (!fs::exists(p))
    throw IoError(std::string(what) + " file not found: " + p.string());
  return p;
}

Dims mask_dims_for(RunConfig const &cfg) {
  if (cfg.mask_dims)
    return *cfg.mask_dims;
  if (cfg.phantom)
    return cfg.phantom_dims();
  if (cfg.inputs.kspace)
    return read_complex(existing(*cfg.inputs.kspace, "kspace")).dims();
  throw ConfigError("mask dims unknown: give mask.dims, a phantom section or inputs.kspace");
}

std::string db_string(double v) {
  if (std::isinf(v))
    return v > 0 ? "+inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f dB", v);
  return buf;
}

std::vector<Index> metric_axes(MetricToggles const &opts) {
  return opts.spatial_axes.empty() ? std::vector<Index>{0, 1} : opts.spatial_axes;
}

RTensor coil_magnitude(CTensor const &img, Index c) {
  Dims d = img.dims();
  Index const nc = d.back();
  d.pop_back();
  RTensor out(d);
  for (Index i = 0; i < out.size(); ++i)
    out[i] = std::abs(img[i * nc + c]);
  return out;
}

} // namespace

Phantom cmd_phantom(RunConfig const &cfg, fs::path const &out_dir) {
  if (!cfg.phantom)
    throw ConfigError("config has no phantom section");
  prepare_dir(out_dir);
  Phantom ph = gen_phantom(*cfg.phantom);
  if (cfg.noise_snr_db) {
    ph.kspace = add_noise(ph.kspace, *cfg.noise_snr_db, {cfg.phantom->seed, 0, 0, 0, StreamPurpose::Noise});
  }
  array_file::write(out_dir / cfg.outputs.kspace, ph.kspace);
  array_file::write(out_dir / cfg.outputs.coil_images, ph.coil_images);
  nlohmann::json spec = to_json(*cfg.phantom);
  spec["dims"] = ph.kspace.dims();
  spec["spatial_axes"] = ph.spatial_axes;
  if (cfg.noise_snr_db)
    spec["noise_snr_db"] = *cfg.noise_snr_db;
  write_json(out_dir / cfg.outputs.phantom_spec, spec);
  return ph;
}

BinaryMask cmd_mask(RunConfig const &cfg, fs::path const &out_dir, std::ostream &out) {
  if (!cfg.mask)
    throw ConfigError("config has no mask section");
  Dims const dims = mask_dims_for(cfg);
  BinaryMask M = gen_mask(dims, *cfg.mask, cfg.mask_axes);
  prepare_dir(out_dir);
  array_file::write(out_dir / cfg.outputs.mask, M);
  char buf[64];
  std::snprintf(buf, sizeof buf, "achieved R: %.4f\n", acceleration(M));
  out << buf;
  return M;
}

ReconResult cmd_recon(RunConfig const &cfg, fs::path const &out_dir, std::ostream &out) {
  if (!cfg.kernel)
    throw ConfigError("config has no kernel section");
  if (!cfg.schedule)
    throw ConfigError("config has no schedule section");
  fs::path const kpath = existing(cfg.inputs.kspace.value_or(out_dir / cfg.outputs.kspace), "kspace");
  fs::path const mpath = existing(cfg.inputs.mask.value_or(out_dir / cfg.outputs.mask), "mask");
  std::optional<fs::path> rpath = cfg.inputs.reference;
  if (!rpath && !cfg.inputs.kspace)
    rpath = kpath;

  CTensor const kspace = read_complex(kpath);
  BinaryMask const M = read_mask(mpath);
  if (kspace.dims() != M.dims())
    throw ShapeError("kspace dims " + to_string(kspace.dims()) + " differ from mask dims " + to_string(M.dims()));
  std::optional<CTensor> ref;
  if (rpath) {
    ref = read_complex(existing(*rpath, "reference"));
    if (ref->dims() != kspace.dims())
      throw ShapeError("reference dims " + to_string(ref->dims()) + " differ from kspace dims " +
                       to_string(kspace.dims()));
  }
  CTensor const X0 = mask_apply(kspace, M);
  KernelMask const K = cfg.kernel->build();

  ReconOptions opts;
  opts.reference = ref ? &*ref : nullptr;
  opts.track_tail_energy = cfg.track_tail_energy;
  opts.rsvd.power_iterations = cfg.power_iterations;
  ReconResult res = hicu_reconstruct(X0, M, K, *cfg.schedule, opts);

  prepare_dir(out_dir);
  array_file::write(out_dir / cfg.outputs.recon, res.estimate);
  nlohmann::json report = to_json(res.report);
  report["schedule"] = to_json(*cfg.schedule);
  report["kernel"] = K.extents();
  report["dims"] = kspace.dims();
  write_json(out_dir / cfg.outputs.report, report);

  out << "iterations: " << res.report.iterations.size() << '\n';
  if (!res.report.iterations.empty()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "objective: %.6e\n", res.report.iterations.back().objective);
    out << buf;
    if (auto s = res.report.iterations.back().ser_db)
      out << "SER: " << db_string(*s) << '\n';
  }
  return res;
}

MetricsReport compute_metrics(CTensor const &ref, CTensor const &est, MetricToggles const &opts) {
  require_same_dims(ref.dims(), est.dims(), "metrics");
  MetricsReport r;
  if (opts.ser)
    r.ser_db = ser(ref, est);
  if (!opts.hfen && !opts.ssim)
    return r;
  auto const axes = metric_axes(opts);
  CTensor const ref_img = ifft_image(ref, axes);
  CTensor const est_img = ifft_image(est, axes);
  if (opts.hfen) {
    if (opts.ssos) {
      r.hfen_db = hfen_slices(ssos_combine(ref_img), ssos_combine(est_img));
    } else {
      double sum = 0.0;
      Index const nc = ref.dims().back();
      for (Index c = 0; c < nc; ++c)
        sum += hfen_slices(coil_magnitude(ref_img, c), coil_magnitude(est_img, c));
      r.hfen_db = sum / static_cast<double>(nc);
    }
  }
  if (opts.ssim)
    r.ssim = ssim_coil_avg(ref_img, est_img);
  return r;
}

std::string format_metrics(MetricsReport const &r) {
  std::string s;
  if (r.ser_db)
    s += "SER: " + db_string(*r.ser_db) + "\n";
  if (r.hfen_db)
    s += "HFEN: " + db_string(*r.hfen_db) + "\n";
  if (r.ssim) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "SSIM: %.4f\n", *r.ssim);
    s += buf;
  }
  return s;
}

MetricsReport cmd_metrics(fs::path const &ref, fs::path const &est, MetricToggles const &opts, std::ostream &out) {
  CTensor const r = read_complex(existing(ref, "reference"));
  CTensor const e = read_complex(existing(est, "estimate"));
  MetricsReport rep = compute_metrics(r, e, opts);
  out << format_metrics(rep);
  return rep;
}

} // namespace hicu
