#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tablex/image.hpp"
#include "tablex/imgproc.hpp"

namespace tablex {

enum class TableType { Bordered, PartiallyBordered, Borderless, Coloured };

/// "bordered", "partially_bordered", "borderless", "coloured".
std::string_view to_string(TableType type);
std::optional<TableType> table_type_from_string(std::string_view name);

struct ClassifierParams {
  /// Horizontal line kernel width as a fraction of the table width.
  double k_w = 0.15;
  /// Vertical line kernel height as a fraction of the table height.
  double k_h = 0.1;
  /// Minimum second-to-first histogram peak ratio for a coloured table.
  double colour_ratio_threshold = 0.25;

  /// Throws std::invalid_argument unless every field is in (0, 1).
  void validate() const;
};

enum class Side { Top, Bottom, Left, Right };

/// Ruling analysis of a cropped table, shared by the classifier and the
/// bordered-cell path.
struct LineAnalysis {
  /// Inverted Otsu image, 1 = ink.
  BinaryImage ink;
  BinaryImage horizontal;
  BinaryImage vertical;
  /// horizontal | vertical.
  BinaryImage lines;
  std::vector<AxisLine> horizontal_lines;
  std::vector<AxisLine> vertical_lines;
};

LineAnalysis analyze_lines(const GrayImage& tab, const ClassifierParams& params);

/// Count ratio of the two largest histogram bins compared against
/// `threshold`. A white dominant bin additionally requires the runner-up
/// to hold more than 10% of the pixels.
bool detect_coloured(const GrayImage& tab_gray, double threshold);

/// True iff the extreme foreground pixels on `side` of `ink` are joined by
/// an extracted line: within 3 px of their offset and covering at least 95%
/// of the span between them.
bool has_outer_border(const BinaryImage& ink, const BinaryImage& horizontal,
                      const BinaryImage& vertical, Side side);

TableType classify(const GrayImage& tab, const ClassifierParams& params = {});

}  // namespace tablex
