#include "plumesr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace plumesr {

using nlohmann::json;

namespace {

double mse_to_db(double mse) {
  if (mse == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(1.0 / mse);
}

std::vector<double> gaussian_window(const SsimConfig& cfg) {
  std::vector<double> g(static_cast<std::size_t>(cfg.window));
  const double c = (cfg.window - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < cfg.window; ++i) {
    g[i] = std::exp(-((i - c) * (i - c)) / (2.0 * cfg.sigma * cfg.sigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

// Valid-mode separable filter of `v` (w x h) with the 1D window `g`.
std::vector<double> filter_valid(const std::vector<double>& v, int w, int h, const std::vector<double>& g) {
  const int n = static_cast<int>(g.size());
  const int wo = w - n + 1;
  const int ho = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * wo);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += g[k] * v[static_cast<std::size_t>(y) * w + x + k];
      tmp[static_cast<std::size_t>(y) * wo + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ho) * wo);
  for (int y = 0; y < ho; ++y) {
    for (int x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += g[k] * tmp[static_cast<std::size_t>(y + k) * wo + x];
      out[static_cast<std::size_t>(y) * wo + x] = acc;
    }
  }
  return out;
}

std::string format_db(double db) {
  if (std::isinf(db)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", db);
  return buf;
}

}  // namespace

double psnr(const SnapshotStack& a, const SnapshotStack& b) {
  require_same_grid(a, b, "psnr");
  double acc = 0.0;
  std::size_t n = 0;
  for (int c = 0; c < 3; ++c) {
    const auto x = a.channels[c].values();
    const auto y = b.channels[c].values();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - y[i];
      acc += d * d;
    }
    n += x.size();
  }
  return mse_to_db(acc / static_cast<double>(n));
}

double psnr(const Field& a, const Field& b) {
  require_same_grid(a, b, "psnr");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return mse_to_db(acc / static_cast<double>(a.size()));
}

double ssim(const Field& a, const Field& b, const SsimConfig& cfg) {
  require_same_grid(a, b, "ssim");
  if (a.width() < cfg.window || a.height() < cfg.window) {
    throw DimensionError("ssim: image " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                         " smaller than the " + std::to_string(cfg.window) + "x" +
                         std::to_string(cfg.window) + " window");
  }
  const int w = a.width();
  const int h = a.height();
  const auto g = gaussian_window(cfg);
  const std::vector<double> x(a.values().begin(), a.values().end());
  const std::vector<double> y(b.values().begin(), b.values().end());
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, w, h, g);
  const auto my = filter_valid(y, w, h, g);
  const auto sxx = filter_valid(xx, w, h, g);
  const auto syy = filter_valid(yy, w, h, g);
  const auto sxy = filter_valid(xy, w, h, g);

  const double c1 = (cfg.k1 * cfg.data_range) * (cfg.k1 * cfg.data_range);
  const double c2 = (cfg.k2 * cfg.data_range) * (cfg.k2 * cfg.data_range);
  double acc = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double mu_x = mx[i];
    const double mu_y = my[i];
    const double var_x = sxx[i] - mu_x * mu_x;
    const double var_y = syy[i] - mu_y * mu_y;
    const double cov = sxy[i] - mu_x * mu_y;
    const double num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2);
    const double den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2);
    acc += num / den;
  }
  return acc / static_cast<double>(mx.size());
}

double ssim(const SnapshotStack& a, const SnapshotStack& b, const SsimConfig& cfg) {
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) acc += ssim(a.channels[c], b.channels[c], cfg);
  return acc / 3.0;
}

double physics_metric(const SnapshotStack& sr, const SnapshotStack& hr, const PhysicsMeta& meta) {
  return physics_loss(sr, hr, meta);
}

Field residual_map(const SnapshotStack& sr, const SnapshotStack& hr) {
  require_same_grid(sr, hr, "residual_map");
  return sr.mid() - hr.mid();
}

double psnr_delta_to_rms_ratio(double delta_db) { return 1.0 - std::pow(10.0, -delta_db / 20.0); }

json db_to_json(double db) {
  if (std::isinf(db)) return db > 0 ? json("inf") : json("-inf");
  return db;
}

double db_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kPsnrInfinity;
    if (s == "-inf") return -kPsnrInfinity;
    throw std::invalid_argument("unexpected dB string '" + s + "'");
  }
  return j.get<double>();
}

SampleMetrics evaluate_sample(const EvalRecord& r) {
  SampleMetrics m;
  m.sample_id = r.sample_id;
  m.psnr_db = psnr(r.prediction, r.truth);
  m.psnr_mid_db = psnr(r.prediction.mid(), r.truth.mid());
  // Clamp: rounding can push an identical-image score a hair above 1.
  m.one_minus_ssim = std::clamp(1.0 - ssim(r.prediction, r.truth), 0.0, 1.0);
  m.l_phys = physics_metric(r.prediction, r.truth, r.meta);
  return m;
}

MetricsReport evaluate(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw std::invalid_argument("evaluate: no predictions supplied");
  std::vector<SampleMetrics> per(records.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < records.size(); ++i) per[i] = evaluate_sample(records[i]);

  std::map<std::pair<std::string, double>, ReportRow> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& row = groups[{records[i].model, records[i].drop_rate}];
    row.model = records[i].model;
    row.drop_rate = records[i].drop_rate;
    row.per_sample.push_back(per[i]);
  }
  MetricsReport report;
  for (auto& [key, row] : groups) {
    double p = 0.0, pm = 0.0, s = 0.0, l = 0.0;
    for (const auto& m : row.per_sample) {
      p += m.psnr_db;
      pm += m.psnr_mid_db;
      s += m.one_minus_ssim;
      l += m.l_phys;
    }
    const auto n = static_cast<double>(row.per_sample.size());
    row.psnr_db = p / n;
    row.psnr_mid_db = pm / n;
    row.one_minus_ssim = s / n;
    row.l_phys = l / n;
    report.rows.push_back(std::move(row));
  }
  return report;
}

json MetricsReport::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    json per = json::array();
    for (const auto& m : r.per_sample) {
      per.push_back({{"sample", m.sample_id},
                     {"psnr_db", db_to_json(m.psnr_db)},
                     {"psnr_mid_db", db_to_json(m.psnr_mid_db)},
                     {"one_minus_ssim", m.one_minus_ssim},
                     {"l_phys", m.l_phys}});
    }
    rows_json.push_back({{"model", r.model},
                         {"drop_rate", r.drop_rate},
                         {"psnr_db", db_to_json(r.psnr_db)},
                         {"psnr_mid_db", db_to_json(r.psnr_mid_db)},
                         {"one_minus_ssim", r.one_minus_ssim},
                         {"l_phys", r.l_phys},
                         {"n_samples", r.per_sample.size()},
                         {"per_sample", per}});
  }
  const SsimConfig ssim_cfg;
  return {{"rows", rows_json},
          {"ssim", {{"window", ssim_cfg.window}, {"sigma", ssim_cfg.sigma}, {"k1", ssim_cfg.k1},
                    {"k2", ssim_cfg.k2}, {"data_range", ssim_cfg.data_range}}},
          {"psnr_data_range", 1.0},
          {"l_phys_aggregation", "corpus_mean"}};
}

MetricsReport MetricsReport::from_json(const json& j) {
  MetricsReport rep;
  for (const auto& r : j.at("rows")) {
    ReportRow row;
    row.model = r.at("model").get<std::string>();
    row.drop_rate = r.at("drop_rate").get<double>();
    row.psnr_db = db_from_json(r.at("psnr_db"));
    row.psnr_mid_db = db_from_json(r.at("psnr_mid_db"));
    row.one_minus_ssim = r.at("one_minus_ssim").get<double>();
    row.l_phys = r.at("l_phys").get<double>();
    for (const auto& m : r.at("per_sample")) {
      row.per_sample.push_back({m.at("sample").get<std::string>(), db_from_json(m.at("psnr_db")),
                                db_from_json(m.at("psnr_mid_db")), m.at("one_minus_ssim").get<double>(),
                                m.at("l_phys").get<double>()});
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string MetricsReport::to_table() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %6s %10s %10s %12s %6s\n", "model", "drop", "PSNR(dB)", "1-SSIM",
                "L_phys", "n");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-12s %5.0f%% %10s %10.2e %12.3e %6zu\n", r.model.c_str(),
                  100.0 * r.drop_rate, format_db(r.psnr_db).c_str(), r.one_minus_ssim, r.l_phys,
                  r.per_sample.size());
    os << line;
  }
  return os.str();
}

}  // namespace plumesr
