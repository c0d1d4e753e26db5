#include "plumesr/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plumesr/config.hpp"
#include "plumesr/container.hpp"
#include "plumesr/dataset.hpp"
#include "plumesr/kernels.hpp"
#include "plumesr/metrics.hpp"
#include "plumesr/raster_io.hpp"
#include "plumesr/resample.hpp"
#include "plumesr/residual.hpp"
#include "plumesr/scene.hpp"
#include "plumesr/solver.hpp"

namespace plumesr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string root;
  std::string resolution = "lr";
  std::string bank;
  std::optional<int> n_samples;
  double rate = 0.0;
  std::string split = "test";
  std::string pred;
  std::string truth;
  std::string model = "model";
  std::string sample;
  double db = 0.0;
};

PipelineConfig load_config(const Options& o) {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : PipelineConfig::load(o.config);
  if (o.seed) cfg.dataset.master_seed = *o.seed;
  if (o.n_samples) cfg.dataset.n_samples = *o.n_samples;
  cfg.dataset.validate();
  return cfg;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::vector<ManifestEntry> select(const fs::path& root, double rate, const std::string& split) {
  std::vector<ManifestEntry> out;
  const Split want = split_from_string(split);
  for (const auto& e : read_manifest(root)) {
    if (std::abs(e.drop_rate - rate) < 1e-12 && e.split == want) out.push_back(e);
  }
  if (out.empty()) {
    throw std::runtime_error("no '" + split + "' samples at drop rate " + std::to_string(rate) + " under " +
                             root.string());
  }
  return out;
}

SnapshotStack read_prediction(const fs::path& path, const PhysicsMeta& meta) {
  const Container c = read_container(path);
  const NamedArray& a = c.has_array("sr") ? c.array("sr") : c.array("hr");
  return array_to_stack(a, meta.dx, meta.dt_snap);
}

void emit_report(const MetricsReport& rep, const fs::path& out_json, std::ostream& out) {
  write_json(out_json, rep.to_json());
  out << rep.to_table();
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const PipelineConfig cfg = load_config(o);
  const WindModel wind = cfg.make_wind();
  cfg.layout.validate(wind);
  const std::uint64_t seed = o.seed.value_or(cfg.dataset.master_seed);
  Rng64 rng(derive_seed(seed, 0));
  SceneSpec scene = sample_scene(rng, cfg.dataset.n_sources, cfg.dataset.max_flux, cfg.layout, wind);
  scene.scene_seed = seed;

  const bool hr = o.resolution == "hr";
  const SolverConfig sc = hr ? cfg.layout.hr_config() : cfg.layout.lr_config();
  const int every = static_cast<int>(std::lround(cfg.layout.dt_snap / sc.dt));
  const auto snaps = integrate(sc, wind, scene, cfg.layout.run_snapshots * every, every);

  Container c;
  std::vector<double> times;
  for (std::size_t k = 0; k < snaps.size(); ++k) times.push_back(k * cfg.layout.dt_snap);
  c.metadata = {{"kind", "simulation"}, {"resolution", o.resolution}, {"dx", sc.dx}, {"dt", sc.dt},
                {"kappa", sc.kappa},    {"times", times},            {"wind", wind.to_json()},
                {"scene", scene.to_json()}, {"layout", cfg.layout.to_json()}};
  NamedArray a;
  a.name = "snapshots";
  a.shape = {snaps.size(), static_cast<std::uint64_t>(sc.height), static_cast<std::uint64_t>(sc.width)};
  std::vector<float> data;
  for (const auto& f : snaps) {
    for (double v : f.values()) data.push_back(static_cast<float>(v));
  }
  a.data = std::move(data);
  c.arrays.push_back(std::move(a));
  write_container(o.out, c);
  out << "wrote " << snaps.size() << " snapshots (" << sc.width << "x" << sc.height << ") to " << o.out << "\n";
  return kExitOk;
}

int cmd_bank(const Options& o, std::ostream& out) {
  const PipelineConfig cfg = load_config(o);
  const SolutionBank bank = build_bank(cfg.layout, cfg.make_wind());
  write_bank(o.out, bank);
  out << "wrote bank with " << bank.n_phases() << " phases, peak " << bank.peak() << " to " << o.out << "\n";
  return kExitOk;
}

int cmd_dataset(const Options& o, std::ostream& out) {
  const PipelineConfig cfg = load_config(o);
  const WindModel wind = cfg.make_wind();
  SolutionBank bank;
  if (!o.bank.empty()) {
    bank = read_bank(o.bank);
    if (!(bank.layout == cfg.layout) || !(bank.wind == wind)) {
      throw std::runtime_error("bank " + o.bank + " was built for a different layout or wind");
    }
  } else {
    bank = build_bank(cfg.layout, wind);
  }
  const auto entries = generate_dataset(cfg.dataset, bank, o.root);
  out << "wrote " << cfg.dataset.n_samples << " samples (" << entries.size() << " manifest entries) to " << o.root
      << "\n";
  return kExitOk;
}

int cmd_drop(const Options& o, std::ostream& out) {
  const auto entries = materialize_drop_view(o.root, o.rate, o.out);
  out << "wrote " << entries.size() << " samples at drop rate " << o.rate << " to " << o.out << "\n";
  return kExitOk;
}

int cmd_dwn_hr(const Options& o, std::ostream& out) {
  const auto entries = make_dwn_hr_inputs(o.root, o.out);
  out << "wrote " << entries.size() << " downsampled-HR inputs to " << o.out << "\n";
  return kExitOk;
}

int cmd_baseline(const Options& o, std::ostream& out) {
  const auto entries = select(o.root, o.rate, o.split);
  fs::create_directories(fs::path(o.out) / "samples");
  std::vector<EvalRecord> records(entries.size());
  std::string first_error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      const SamplePair s = load_sample(o.root, entries[i]);
      const SnapshotStack sr = quantize_f32(bicubic_baseline(s.lr, s.mask));
      Container c;
      c.metadata = {{"kind", "prediction"}, {"model", "bicubic"}, {"id", s.id}, {"drop_rate", s.drop_rate}};
      c.arrays.push_back(stack_to_array("sr", sr));
      write_container(fs::path(o.out) / entries[i].path, c);
      records[i] = {"bicubic", s.drop_rate, s.id, sr, s.hr, s.meta};
    } catch (const std::exception& e) {
#pragma omp critical(plumesr_cli_baseline)
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);
  emit_report(evaluate(records), fs::path(o.out) / "report.json", out);
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto entries = select(o.truth, o.rate, o.split);
  std::vector<EvalRecord> records;
  records.reserve(entries.size());
  for (const auto& e : entries) {
    const SamplePair s = load_sample(o.truth, e);
    records.push_back({o.model, s.drop_rate, s.id, read_prediction(fs::path(o.pred) / e.path, s.meta), s.hr, s.meta});
  }
  emit_report(evaluate(records), o.out, out);
  return kExitOk;
}

int cmd_residual_terms(const Options& o, std::ostream& out) {
  const Container c = read_container(o.sample);
  const PhysicsMeta meta = PhysicsMeta::from_json(c.metadata.at("physics"));
  const SnapshotStack hr = array_to_stack(c.array("hr"), meta.dx, meta.dt_snap);

  SourceRaster sources(meta.scene, hr.width(), hr.height(), hr.dx());
  Field source(hr.width(), hr.height(), hr.dx());
  sources.accumulate(meta.t_center, source.values(), meta.source_scale);
  const PdeTerms terms = pde_terms(hr.mid(), meta.wind.at(meta.t_center), source, meta.kappa);
  const Field residual = residual_field(hr, meta);

  fs::create_directories(o.out);
  const std::vector<std::pair<std::string, const Field*>> rasters{{"residual", &residual},
                                                                  {"advection", &terms.advection},
                                                                  {"diffusion", &terms.diffusion},
                                                                  {"source", &terms.source},
                                                                  {"dcdt", &terms.dcdt}};
  for (const auto& [name, field] : rasters) {
    Container rc;
    rc.metadata = {{"kind", "raster"}, {"term", name}, {"sample", o.sample}, {"t_center", meta.t_center}};
    rc.arrays.push_back(field_to_array("raster", *field, DType::f64));
    write_container(fs::path(o.out) / (name + ".plm"), rc);
    out << name << ": min " << field->min() << " max " << field->max() << "\n";
  }
  return kExitOk;
}

int cmd_psnr_delta(const Options& o, std::ostream& out) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", psnr_delta_to_rms_ratio(o.db));
  out << buf << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  kernels::configure_threads_from_env();

  CLI::App app{"Plume super-resolution pipeline: simulation, corpus generation, baselines and metrics.", "plumesr"};
  app.set_help_all_flag("--help-all", "Print help for every subcommand");
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "Simulate one random scene and write its snapshots");
  simulate->add_option("--config", o.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  simulate->add_option("--out", o.out, "Output container")->required();
  simulate->add_option("--resolution", o.resolution, "Grid to simulate on")
      ->check(CLI::IsMember({"lr", "hr"}))
      ->capture_default_str();
  simulate->add_option("--seed", o.seed, "Scene seed (defaults to the dataset seed)");

  auto* bank = app.add_subcommand("bank", "Build the single-source solution bank");
  bank->add_option("--config", o.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  bank->add_option("--out", o.out, "Output bank container")->required();

  auto* dataset = app.add_subcommand("dataset", "Generate a paired LR/HR corpus");
  dataset->add_option("--config", o.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  dataset->add_option("--root", o.root, "Dataset root directory")->required();
  dataset->add_option("--seed", o.seed, "Master seed (overrides config)");
  dataset->add_option("--bank", o.bank, "Prebuilt bank (built on the fly when omitted)")->check(CLI::ExistingFile);
  dataset->add_option("--n-samples", o.n_samples, "Sample count (overrides config)")->check(CLI::PositiveNumber);

  auto* drop = app.add_subcommand("drop", "Materialise the corrupted view of a corpus at one drop rate");
  drop->add_option("--root", o.root, "Dataset root directory")->required()->check(CLI::ExistingDirectory);
  drop->add_option("--rate", o.rate, "Drop rate in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
  drop->add_option("--out", o.out, "Output directory")->required();

  auto* dwn = app.add_subcommand("dwn-hr", "Derive a corpus whose LR inputs are downsampled HR");
  dwn->add_option("--root", o.root, "Dataset root directory")->required()->check(CLI::ExistingDirectory);
  dwn->add_option("--out", o.out, "Output directory")->required();

  auto* baseline = app.add_subcommand("baseline", "Run the bicubic fill + upsample baseline over a split");
  baseline->add_option("--root", o.root, "Dataset root directory")->required()->check(CLI::ExistingDirectory);
  baseline->add_option("--rate", o.rate, "Drop rate in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
  baseline->add_option("--out", o.out, "Prediction directory (report.json is written here)")->required();
  baseline->add_option("--split", o.split, "Split to process")
      ->check(CLI::IsMember({"train", "val", "test"}))
      ->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Score a prediction directory against a corpus");
  eval->add_option("--pred", o.pred, "Prediction root (same relative paths as the corpus)")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval->add_option("--truth", o.truth, "Dataset root directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--rate", o.rate, "Drop rate in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
  eval->add_option("--split", o.split, "Split to score")
      ->check(CLI::IsMember({"train", "val", "test"}))
      ->capture_default_str();
  eval->add_option("--model", o.model, "Model name for the report row")->capture_default_str();
  eval->add_option("--out", o.out, "Report JSON path")->required();

  auto* terms = app.add_subcommand("residual-terms", "Write the residual and per-term rasters of one sample");
  terms->add_option("--sample", o.sample, "Sample container")->required()->check(CLI::ExistingFile);
  terms->add_option("--out", o.out, "Output directory")->required();

  auto* delta = app.add_subcommand("psnr-delta", "Convert a PSNR gain in dB to a fractional RMS decrease");
  delta->add_option("--db", o.db, "PSNR gain in dB")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(o, out);
    if (*bank) return cmd_bank(o, out);
    if (*dataset) return cmd_dataset(o, out);
    if (*drop) return cmd_drop(o, out);
    if (*dwn) return cmd_dwn_hr(o, out);
    if (*baseline) return cmd_baseline(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*terms) return cmd_residual_terms(o, out);
    if (*delta) return cmd_psnr_delta(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace plumesr::cli
