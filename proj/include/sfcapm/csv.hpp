#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "sfcapm/moments.hpp"

namespace sfcapm {

struct CsvOptions {
  // Field delimiter; auto-detected from the header (tab if present,
  // otherwise comma) when unset.
  std::optional<char> delimiter;
};

// Parses delimited text with a header row into a validated AnnualSeries.
// Required column: consumption. Optional: year, equity_return, rf_return,
// dividends; unknown columns are ignored. Diagnostics name the offending
// column and 1-based data row.
AnnualSeries parse_series(std::string_view text, const CsvOptions& options = {});

AnnualSeries load_series(const std::filesystem::path& path,
                         const CsvOptions& options = {});

}  // namespace sfcapm
