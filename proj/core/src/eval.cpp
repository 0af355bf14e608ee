#include "synthsusp/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

namespace synthsusp {

namespace {

// Pixel offsets within a physical radius, precomputed once per (spacing,
// radius) pair.
std::vector<std::pair<int, int>> disc_offsets(Vec2 spacing, double radius_mm) {
  const int max_dr = static_cast<int>(std::floor(radius_mm / spacing.y));
  const int max_dc = static_cast<int>(std::floor(radius_mm / spacing.x));
  std::vector<std::pair<int, int>> out;
  for (int dr = -max_dr; dr <= max_dr; ++dr) {
    for (int dc = -max_dc; dc <= max_dc; ++dc) {
      const double dy = dr * spacing.y;
      const double dx = dc * spacing.x;
      if (dx * dx + dy * dy <= radius_mm * radius_mm) out.emplace_back(dr, dc);
    }
  }
  return out;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

double score_roi(const SuspiciousnessMap& susp, const RoiMask& roi) {
  if (roi.width != susp.width || roi.height != susp.height) {
    throw Error(ErrorCode::ShapeMismatch, "roi shape does not match map");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < roi.bits.size(); ++i) {
    if (roi.bits[i] && susp.valid[i]) {
      sum += susp.values[i];
      ++n;
    }
  }
  if (n == 0) {
    throw Error(ErrorCode::NoValidPixel, "roi covers no valid pixel");
  }
  return sum / static_cast<double>(n);
}

RocCurve roc_analysis(const std::vector<double>& pos_scores,
                      const std::vector<double>& neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "roc_analysis needs non-empty score lists");
  }
  // Distinct thresholds descending; equal scores share one threshold.
  std::map<double, std::pair<int, int>, std::greater<double>> buckets;
  for (double s : pos_scores) buckets[s].first++;
  for (double s : neg_scores) buckets[s].second++;

  const double np = static_cast<double>(pos_scores.size());
  const double nn = static_cast<double>(neg_scores.size());

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  int tp = 0, fp = 0;
  for (const auto& [threshold, counts] : buckets) {
    tp += counts.first;
    fp += counts.second;
    curve.points.push_back({fp / nn, tp / np, threshold});
  }
  double auc = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

std::vector<LocalizationPoint> find_local_maxima(const SuspiciousnessMap& susp,
                                                 double min_distance_mm,
                                                 const std::string& case_id) {
  if (min_distance_mm < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "min_distance_mm must be >= 0");
  }
  const int w = susp.width, h = susp.height;
  const auto offsets = disc_offsets(susp.spacing, min_distance_mm);

  // Candidates: valid pixels not dominated within the radius.
  std::vector<int> candidates;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (!susp.valid[i]) continue;
      const double v = susp.values[i];
      bool is_max = true;
      for (const auto& [dr, dc] : offsets) {
        const int rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
        const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
        if (susp.valid[j] && susp.values[j] > v) {
          is_max = false;
          break;
        }
      }
      if (is_max) candidates.push_back(static_cast<int>(i));
    }
  }

  // Merge equal-valued candidates lying within the radius of each other.
  DisjointSet groups(candidates.size());
  std::vector<int> pixel_to_cand(static_cast<std::size_t>(w) * h, -1);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    pixel_to_cand[candidates[k]] = static_cast<int>(k);
  }
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const int i = candidates[k];
    const int r = i / w, c = i % w;
    for (const auto& [dr, dc] : offsets) {
      const int rr = r + dr, cc = c + dc;
      if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
      const int other = pixel_to_cand[rr * w + cc];
      if (other >= 0 && susp.values[candidates[other]] == susp.values[i]) {
        groups.unite(static_cast<int>(k), other);
      }
    }
  }

  std::map<int, std::vector<int>> plateau;  // root -> member pixel indices
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    plateau[groups.find(static_cast<int>(k))].push_back(candidates[k]);
  }

  std::vector<LocalizationPoint> points;
  for (auto& [root, members] : plateau) {
    std::sort(members.begin(), members.end());
    double sr = 0.0, sc = 0.0;
    for (int i : members) {
      sr += i / w;
      sc += i % w;
    }
    const double cr = sr / members.size();
    const double cc = sc / members.size();
    int row = static_cast<int>(std::floor(cr + 0.5));
    int col = static_cast<int>(std::floor(cc + 0.5));
    const double value = susp.values[members.front()];
    const std::size_t at = static_cast<std::size_t>(row) * w + col;
    const bool on_plateau =
        row >= 0 && row < h && col >= 0 && col < w && susp.valid[at] &&
        std::binary_search(members.begin(), members.end(), static_cast<int>(at));
    if (!on_plateau) {
      // Snap to the nearest member; ties by (row, col) via the sorted order.
      double best = std::numeric_limits<double>::infinity();
      int best_i = members.front();
      for (int i : members) {
        const double dr = i / w - cr, dc = i % w - cc;
        const double d2 = dr * dr + dc * dc;
        if (d2 < best - 1e-12) {
          best = d2;
          best_i = i;
        }
      }
      row = best_i / w;
      col = best_i % w;
    }
    points.push_back({row, col, value, case_id});
  }

  std::sort(points.begin(), points.end(),
            [](const LocalizationPoint& a, const LocalizationPoint& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.row != b.row) return a.row < b.row;
              return a.col < b.col;
            });
  return points;
}

FrocCurve froc_analysis(const std::vector<CaseRecord>& cases,
                        double match_radius_mm, double min_distance_mm) {
  if (cases.empty()) {
    throw Error(ErrorCode::InvalidArgument, "froc_analysis needs >= 1 case");
  }
  int n_lesions = 0;
  for (const auto& c : cases) n_lesions += static_cast<int>(c.truth_rois.size());
  if (n_lesions == 0) {
    throw Error(ErrorCode::InvalidArgument, "froc_analysis needs >= 1 lesion");
  }

  struct PointRef {
    double score;
    int case_index;
    int row, col;
  };
  std::vector<PointRef> all;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    for (const auto& p :
         find_local_maxima(cases[ci].susp, min_distance_mm, cases[ci].case_id)) {
      all.push_back({p.score, static_cast<int>(ci), p.row, p.col});
    }
  }
  std::sort(all.begin(), all.end(), [](const PointRef& a, const PointRef& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.case_index != b.case_index) return a.case_index < b.case_index;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });

  // Distance from a point to the nearest set pixel of a ROI, in mm.
  auto roi_distance = [](const SuspiciousnessMap& susp, const RoiMask& roi,
                         int row, int col) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < roi.height; ++r) {
      for (int c = 0; c < roi.width; ++c) {
        if (!roi.get(r, c)) continue;
        const double dy = (r - row) * susp.spacing.y;
        const double dx = (c - col) * susp.spacing.x;
        best = std::min(best, std::sqrt(dx * dx + dy * dy));
      }
    }
    return best;
  };

  std::vector<std::vector<bool>> matched(cases.size());
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    matched[ci].assign(cases[ci].truth_rois.size(), false);
  }

  FrocCurve curve;
  curve.n_patients = static_cast<int>(cases.size());
  curve.n_lesions = n_lesions;

  int tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < all.size()) {
    const double threshold = all[i].score;
    // Consume the whole tie group at this threshold.
    for (; i < all.size() && all[i].score == threshold; ++i) {
      const PointRef& p = all[i];
      const auto& rois = cases[p.case_index].truth_rois;
      int best_roi = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < rois.size(); ++k) {
        if (matched[p.case_index][k]) continue;
        const double d = roi_distance(cases[p.case_index].susp, rois[k], p.row, p.col);
        if (d <= match_radius_mm && d < best_d) {
          best_d = d;
          best_roi = static_cast<int>(k);
        }
      }
      if (best_roi >= 0) {
        matched[p.case_index][best_roi] = true;
        ++tp;
      } else {
        ++fp;
      }
    }
    curve.points.push_back({fp / static_cast<double>(curve.n_patients),
                            tp / static_cast<double>(n_lesions), threshold});
  }
  return curve;
}

double sensitivity_at(const FrocCurve& curve, double fp_per_patient) {
  if (curve.points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty FROC curve");
  }
  // Collapse to distinct fp rates, keeping the best sensitivity at each.
  std::vector<std::pair<double, double>> knots;
  for (const auto& p : curve.points) {
    if (!knots.empty() && knots.back().first == p.fp_per_patient) {
      knots.back().second = std::max(knots.back().second, p.sensitivity);
    } else {
      knots.emplace_back(p.fp_per_patient, p.sensitivity);
    }
  }
  if (fp_per_patient <= knots.front().first) return knots.front().second;
  if (fp_per_patient >= knots.back().first) return knots.back().second;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (fp_per_patient <= knots[i].first) {
      const auto& [x0, y0] = knots[i - 1];
      const auto& [x1, y1] = knots[i];
      const double t = (fp_per_patient - x0) / (x1 - x0);
      return y0 + t * (y1 - y0);
    }
  }
  return knots.back().second;
}

namespace {

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<std::array<double, 3>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out << "threshold,fpr_or_fppp,tpr_or_sens\n";
  char buf[128];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", row[0], row[1], row[2]);
    out << buf;
  }
  if (!out.good()) {
    throw Error(ErrorCode::IoFailure, "write failure on " + path.string());
  }
}

}  // namespace

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
  std::vector<std::array<double, 3>> rows;
  for (const auto& p : curve.points) rows.push_back({p.threshold, p.fpr, p.tpr});
  write_curve_csv(path, rows);
}

void write_froc_csv(const FrocCurve& curve, const std::filesystem::path& path) {
  std::vector<std::array<double, 3>> rows;
  for (const auto& p : curve.points) {
    rows.push_back({p.threshold, p.fp_per_patient, p.sensitivity});
  }
  write_curve_csv(path, rows);
}

}  // namespace synthsusp
