#pragma once

#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "plumesr/field.hpp"
#include "plumesr/residual.hpp"

namespace plumesr {

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

/// 10*log10(1/MSE) over all pixels and channels, data range [0, 1].
/// Identical inputs give kPsnrInfinity.
double psnr(const SnapshotStack& a, const SnapshotStack& b);
double psnr(const Field& a, const Field& b);

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

/// Gaussian-windowed SSIM over every valid window position.
double ssim(const Field& a, const Field& b, const SsimConfig& cfg = {});
/// Mean of the per-channel scores.
double ssim(const SnapshotStack& a, const SnapshotStack& b, const SsimConfig& cfg = {});

double physics_metric(const SnapshotStack& sr, const SnapshotStack& hr, const PhysicsMeta& meta);

/// Signed middle-channel difference sr - hr.
Field residual_map(const SnapshotStack& sr, const SnapshotStack& hr);

/// Fractional RMS reduction implied by a PSNR gain: 1 - 10^(-delta/20).
double psnr_delta_to_rms_ratio(double delta_db);

/// One evaluated prediction, tagged by the model and drop rate it belongs to.
struct EvalRecord {
  std::string model;
  double drop_rate = 0.0;
  std::string sample_id;
  SnapshotStack prediction;
  SnapshotStack truth;
  PhysicsMeta meta;
};

struct SampleMetrics {
  std::string sample_id;
  double psnr_db = 0.0;
  double psnr_mid_db = 0.0;
  double one_minus_ssim = 0.0;
  double l_phys = 0.0;
};

struct ReportRow {
  std::string model;
  double drop_rate = 0.0;
  double psnr_db = 0.0;
  double psnr_mid_db = 0.0;
  double one_minus_ssim = 0.0;
  double l_phys = 0.0;
  std::vector<SampleMetrics> per_sample;
};

struct MetricsReport {
  std::vector<ReportRow> rows;

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);
  /// Fixed-width table: model, drop, PSNR, 1-SSIM, L_phys.
  std::string to_table() const;
};

SampleMetrics evaluate_sample(const EvalRecord& r);

/// Rows are sorted by (model, drop_rate); per-sample lists keep input order.
/// Aggregates are arithmetic means of the per-sample values.
MetricsReport evaluate(const std::vector<EvalRecord>& records);

/// JSON number, or the string "inf" for the infinite PSNR sentinel.
nlohmann::json db_to_json(double db);
double db_from_json(const nlohmann::json& j);

}  // namespace plumesr
