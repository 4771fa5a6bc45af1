#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablex/annotations.hpp"
#include "tablex/detector.hpp"
#include "tablex/extract.hpp"

namespace tablex {

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

/// Greedy matching in ranking order (see ranks_before): each prediction takes
/// the unmatched ground-truth box of highest IoU if that IoU >= `threshold`.
MatchCounts match_boxes(std::vector<Detection> preds, const std::vector<BBox>& gts,
                        double threshold);

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// Zero wherever a denominator is zero.
Prf precision_recall_f1(const MatchCounts& counts);

struct ApResult {
  double ap = 0;
  /// False when there is no ground truth; `ap` is then 0.
  bool defined = false;
};

struct PageDetections {
  std::vector<Detection> preds;
  std::vector<BBox> gts;
};

/// Area under the all-point interpolated precision/recall curve. Predictions
/// from every page are ranked together; matching stays within a page.
ApResult average_precision(std::span<const PageDetections> pages, double threshold);
ApResult average_precision(const std::vector<Detection>& preds,
                           const std::vector<BBox>& gts, double threshold);

/// Unit-cost edit distance over Unicode code points (invalid UTF-8 bytes
/// count as single characters).
std::size_t levenshtein(std::string_view a, std::string_view b);

struct TextBox {
  BBox box;
  std::string text;
};

inline constexpr double kContentPairIou = 0.5;

/// Cells are paired by box IoU >= `pair_iou` (greedy, row-major prediction
/// order). A pair within `bound` edits is a true positive; a pair beyond it
/// counts as one false positive and one false negative.
MatchCounts content_counts(const std::vector<TextBox>& pred,
                           const std::vector<TextBox>& gt, std::size_t bound,
                           double pair_iou = kContentPairIou);
Prf content_scores(const TableContent& pred, const AnnotatedTable& gt,
                   std::size_t bound);

std::vector<TextBox> text_boxes(const TableContent& table);
std::vector<TextBox> text_boxes(const AnnotatedTable& table);

struct ThresholdScores {
  double iou = 0;
  MatchCounts counts;
  Prf prf;
  ApResult ap;
};

struct ContentScore {
  std::size_t bound = 0;
  MatchCounts counts;
  Prf prf;
};

struct EvalReport {
  std::vector<ThresholdScores> tables;
  std::vector<ThresholdScores> cells;
  /// Mean P/R/F1 over IoU 0.50, 0.55, ..., 0.95.
  Prf table_average;
  Prf cell_average;
  std::vector<ContentScore> content;
};

inline constexpr double kReportIous[] = {0.5, 0.6, 0.7, 0.8, 0.9};
inline constexpr std::size_t kEditBounds[] = {0, 2, 3};

/// Micro-averaged over all pages of `truth`; predicted pages missing from
/// `truth` count as false positives.
EvalReport evaluate(const std::vector<PageContent>& predictions,
                    const AnnotationSet& truth);

nlohmann::ordered_json report_to_json(const EvalReport& report);
/// Aligned plain-text tables: one block each for tables, cells and content.
std::string format_report(const EvalReport& report);

}  // namespace tablex
