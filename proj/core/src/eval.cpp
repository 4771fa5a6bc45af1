#include "tablex/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

namespace tablex {

namespace {

// Greedy matching of already-ranked predictions; returns a hit flag each.
std::vector<bool> greedy_hits(const std::vector<Detection>& ranked,
                              const std::vector<BBox>& gts, double threshold) {
  std::vector<bool> taken(gts.size(), false);
  std::vector<bool> hits(ranked.size(), false);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    double best = -1;
    std::size_t best_j = gts.size();
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (taken[j]) continue;
      const double v = iou(ranked[i].box, gts[j]);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best_j < gts.size() && best >= threshold) {
      taken[best_j] = true;
      hits[i] = true;
    }
  }
  return hits;
}

double safe_div(double a, double b) { return b > 0 ? a / b : 0.0; }

}  // namespace

MatchCounts match_boxes(std::vector<Detection> preds, const std::vector<BBox>& gts,
                        double threshold) {
  std::stable_sort(preds.begin(), preds.end(), ranks_before);
  const auto hits = greedy_hits(preds, gts, threshold);
  MatchCounts c;
  c.tp = static_cast<std::size_t>(std::count(hits.begin(), hits.end(), true));
  c.fp = preds.size() - c.tp;
  c.fn = gts.size() - c.tp;
  return c;
}

Prf precision_recall_f1(const MatchCounts& counts) {
  Prf out;
  out.precision = safe_div(double(counts.tp), double(counts.tp + counts.fp));
  out.recall = safe_div(double(counts.tp), double(counts.tp + counts.fn));
  out.f1 = safe_div(2 * out.precision * out.recall, out.precision + out.recall);
  return out;
}

ApResult average_precision(std::span<const PageDetections> pages, double threshold) {
  struct Ranked {
    Detection det;
    bool hit;
  };
  std::vector<Ranked> all;
  std::size_t total_gt = 0;
  for (const auto& page : pages) {
    total_gt += page.gts.size();
    auto preds = page.preds;
    std::stable_sort(preds.begin(), preds.end(), ranks_before);
    const auto hits = greedy_hits(preds, page.gts, threshold);
    for (std::size_t i = 0; i < preds.size(); ++i) all.push_back({preds[i], hits[i]});
  }
  if (total_gt == 0) return {0.0, false};
  std::stable_sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
    return ranks_before(a.det, b.det);
  });

  const std::size_t n = all.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (all[i].hit) ++tp;
    precision[i] = double(tp) / double(i + 1);
    recall[i] = double(tp) / double(total_gt);
  }
  for (std::size_t i = n; i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0;
  double prev_recall = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return {ap, true};
}

ApResult average_precision(const std::vector<Detection>& preds,
                           const std::vector<BBox>& gts, double threshold) {
  const PageDetections page{preds, gts};
  return average_precision(std::span<const PageDetections>(&page, 1), threshold);
}

namespace {

std::vector<char32_t> code_points(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3
                                               : (b0 >> 3) == 0x1E ? 4 : 0;
    bool ok = len > 0 && i + len <= s.size();
    char32_t cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
    for (int k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      // Raw byte, kept distinct from valid code points.
      out.push_back(0x110000 + b0);
      ++i;
    } else {
      out.push_back(cp);
      i += static_cast<std::size_t>(len);
    }
  }
  return out;
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const auto s = code_points(a);
  const auto t = code_points(b);
  std::vector<std::size_t> prev(t.size() + 1), cur(t.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= s.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

MatchCounts content_counts(const std::vector<TextBox>& pred,
                           const std::vector<TextBox>& gt, std::size_t bound,
                           double pair_iou) {
  std::vector<bool> taken(gt.size(), false);
  MatchCounts c;
  std::size_t paired = 0;
  for (const auto& p : pred) {
    double best = -1;
    std::size_t best_j = gt.size();
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (taken[j]) continue;
      const double v = iou(p.box, gt[j].box);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best_j == gt.size() || best < pair_iou) {
      ++c.fp;
      continue;
    }
    taken[best_j] = true;
    ++paired;
    if (levenshtein(p.text, gt[best_j].text) <= bound) {
      ++c.tp;
    } else {
      ++c.fp;
      ++c.fn;
    }
  }
  c.fn += gt.size() - paired;
  return c;
}

std::vector<TextBox> text_boxes(const TableContent& table) {
  std::vector<TextBox> out;
  for (std::size_t r = 0; r < table.cells.size(); ++r) {
    for (std::size_t c = 0; c < table.cells[r].size(); ++c) {
      const std::string text = r < table.rows.size() && c < table.rows[r].size()
                                   ? table.rows[r][c]
                                   : std::string{};
      out.push_back({table.cells[r][c], text});
    }
  }
  return out;
}

std::vector<TextBox> text_boxes(const AnnotatedTable& table) {
  std::vector<TextBox> out;
  for (const auto& c : table.cells) out.push_back({c.box, c.text});
  return out;
}

Prf content_scores(const TableContent& pred, const AnnotatedTable& gt,
                   std::size_t bound) {
  return precision_recall_f1(content_counts(text_boxes(pred), text_boxes(gt), bound));
}

EvalReport evaluate(const std::vector<PageContent>& predictions,
                    const AnnotationSet& truth) {
  std::map<std::string, const PageContent*> by_id;
  for (const auto& p : predictions) by_id[p.page_id] = &p;

  std::vector<PageDetections> table_pages, cell_pages;
  std::vector<std::vector<TextBox>> pred_text, gt_text;
  auto add_page = [&](const PageContent* pred, const AnnotatedPage* gt) {
    PageDetections tables, cells;
    std::vector<TextBox> ptext, gtext;
    if (pred != nullptr) {
      for (const auto& t : pred->tables) {
        tables.preds.push_back({t.table_box, t.confidence, pred->page_id});
        for (const auto& row : t.cells) {
          for (const auto& b : row) cells.preds.push_back({b, t.confidence, pred->page_id});
        }
        auto tb = text_boxes(t);
        ptext.insert(ptext.end(), tb.begin(), tb.end());
      }
    }
    if (gt != nullptr) {
      for (const auto& t : gt->tables) {
        tables.gts.push_back(t.box);
        for (const auto& c : t.cells) cells.gts.push_back(c.box);
        auto tb = text_boxes(t);
        gtext.insert(gtext.end(), tb.begin(), tb.end());
      }
    }
    table_pages.push_back(std::move(tables));
    cell_pages.push_back(std::move(cells));
    pred_text.push_back(std::move(ptext));
    gt_text.push_back(std::move(gtext));
  };
  for (const auto& page : truth.pages) {
    auto it = by_id.find(page.page_id);
    add_page(it == by_id.end() ? nullptr : it->second, &page);
  }
  for (const auto& p : predictions) {
    if (truth.find(p.page_id) == nullptr) add_page(&p, nullptr);
  }

  auto score = [](const std::vector<PageDetections>& pages, double t) {
    ThresholdScores s;
    s.iou = t;
    for (const auto& p : pages) s.counts += match_boxes(p.preds, p.gts, t);
    s.prf = precision_recall_f1(s.counts);
    s.ap = average_precision(pages, t);
    return s;
  };
  auto sweep_average = [](const std::vector<PageDetections>& pages) {
    Prf avg;
    constexpr int kSteps = 10;
    for (int i = 0; i < kSteps; ++i) {
      MatchCounts c;
      for (const auto& p : pages) c += match_boxes(p.preds, p.gts, 0.5 + 0.05 * i);
      const Prf prf = precision_recall_f1(c);
      avg.precision += prf.precision;
      avg.recall += prf.recall;
      avg.f1 += prf.f1;
    }
    avg.precision /= kSteps;
    avg.recall /= kSteps;
    avg.f1 /= kSteps;
    return avg;
  };

  EvalReport report;
  for (double t : kReportIous) {
    report.tables.push_back(score(table_pages, t));
    report.cells.push_back(score(cell_pages, t));
  }
  report.table_average = sweep_average(table_pages);
  report.cell_average = sweep_average(cell_pages);
  for (std::size_t d : kEditBounds) {
    ContentScore cs;
    cs.bound = d;
    for (std::size_t i = 0; i < pred_text.size(); ++i) {
      cs.counts += content_counts(pred_text[i], gt_text[i], d);
    }
    cs.prf = precision_recall_f1(cs.counts);
    report.content.push_back(cs);
  }
  return report;
}

namespace {

nlohmann::ordered_json prf_json(const Prf& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

nlohmann::ordered_json counts_json(const MatchCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
}

nlohmann::ordered_json thresholds_json(const std::vector<ThresholdScores>& rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& s : rows) {
    nlohmann::ordered_json row{{"iou", s.iou}};
    row.update(prf_json(s.prf));
    row["map"] = s.ap.ap;
    row["map_defined"] = s.ap.defined;
    row["counts"] = counts_json(s.counts);
    out.push_back(std::move(row));
  }
  return out;
}

void append_row(std::string& out, const char* fmt, auto... args) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, args...);
  out += buf;
}

void detection_block(std::string& out, const char* title,
                     const std::vector<ThresholdScores>& rows, const Prf& avg) {
  out += title;
  out += '\n';
  append_row(out, "%-10s %6s %6s %6s %9s\n", "IoU", "P", "R", "F1", "mAP(%)");
  for (const auto& s : rows) {
    append_row(out, "%-10.2f %6.2f %6.2f %6.2f %8.2f%%\n", s.iou, s.prf.precision,
               s.prf.recall, s.prf.f1, 100.0 * s.ap.ap);
  }
  append_row(out, "%-10s %6.2f %6.2f %6.2f\n", "0.5-0.95", avg.precision,
             avg.recall, avg.f1);
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  auto content = nlohmann::ordered_json::array();
  for (const auto& c : report.content) {
    nlohmann::ordered_json row{{"edit_distance", c.bound}};
    row.update(prf_json(c.prf));
    row["counts"] = counts_json(c.counts);
    content.push_back(std::move(row));
  }
  return {{"tables", thresholds_json(report.tables)},
          {"tables_average", prf_json(report.table_average)},
          {"cells", thresholds_json(report.cells)},
          {"cells_average", prf_json(report.cell_average)},
          {"content", std::move(content)}};
}

std::string format_report(const EvalReport& report) {
  std::string out;
  detection_block(out, "Table detection", report.tables, report.table_average);
  out += '\n';
  detection_block(out, "Cell detection", report.cells, report.cell_average);
  out += '\n';
  out += "Cell content\n";
  append_row(out, "%-10s %6s %6s %6s\n", "Edit dist", "P", "R", "F1");
  for (const auto& c : report.content) {
    append_row(out, "%-10zu %6.2f %6.2f %6.2f\n", c.bound, c.prf.precision,
               c.prf.recall, c.prf.f1);
  }
  return out;
}

}  // namespace tablex
