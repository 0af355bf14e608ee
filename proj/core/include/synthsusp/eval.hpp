#pragma once

#include <string>
#include <vector>

#include "synthsusp/roi_mask.hpp"
#include "synthsusp/suspicion.hpp"

namespace synthsusp {

enum class CaseLabel { Positive, Negative };

struct CaseRecord {
  std::string case_id;
  SuspiciousnessMap susp;
  std::vector<RoiMask> truth_rois;  // placed, grid-shaped; empty for negatives
  CaseLabel label = CaseLabel::Negative;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // swept from the highest threshold down
  double auc = 0.0;
};

struct FrocPoint {
  double fp_per_patient = 0.0;
  double sensitivity = 0.0;
  double threshold = 0.0;
};

struct FrocCurve {
  std::vector<FrocPoint> points;  // swept from the highest threshold down
  int n_patients = 0;
  int n_lesions = 0;
};

struct LocalizationPoint {
  int row = 0;
  int col = 0;
  double score = 0.0;
  std::string case_id;
};

/// Mean suspiciousness over the valid pixels inside the ROI. Throws
/// NoValidPixel when the ROI covers none.
double score_roi(const SuspiciousnessMap& susp, const RoiMask& roi);

/// Threshold sweep over the union of scores (classification rule:
/// score >= threshold is called positive); ties share one threshold and the
/// AUC is the trapezoidal integral, which equals the Mann-Whitney statistic
/// with ties counted 1/2.
RocCurve roc_analysis(const std::vector<double>& pos_scores,
                      const std::vector<double>& neg_scores);

/// Local maxima of the map: valid pixels whose value is >= every valid pixel
/// within the physical radius. Equal-valued maxima within the radius of each
/// other merge (transitively) into one plateau reported at its centroid
/// pixel, snapped to the nearest plateau member if the rounded centroid
/// falls off the plateau. Sorted by descending score, ties by (row, col).
std::vector<LocalizationPoint> find_local_maxima(const SuspiciousnessMap& susp,
                                                 double min_distance_mm,
                                                 const std::string& case_id = "");

/// FROC over a cohort: localization points are matched greedily in
/// descending-score order; a point is a true positive when its physical
/// distance to the nearest pixel of a still-unmatched truth ROI in its case
/// is <= match_radius_mm (inclusive). Each ROI is matched at most once.
FrocCurve froc_analysis(const std::vector<CaseRecord>& cases,
                        double match_radius_mm = 5.0,
                        double min_distance_mm = 5.0);

/// Linear interpolation of sensitivity at the given false-positive rate,
/// clamped to the curve extremes.
double sensitivity_at(const FrocCurve& curve, double fp_per_patient);

/// Writes a curve as CSV: threshold,fpr_or_fppp,tpr_or_sens (9 significant
/// digits, one row per operating point).
void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);
void write_froc_csv(const FrocCurve& curve, const std::filesystem::path& path);

}  // namespace synthsusp
