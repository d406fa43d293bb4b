#include "sfcapm/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sfcapm/errors.hpp"

namespace sfcapm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view token, const std::string& column,
                    std::size_t row) {
  const std::string_view t = trim(token);
  double out{};
  const auto result = std::from_chars(t.data(), t.data() + t.size(), out);
  if (result.ec != std::errc{} || result.ptr != t.data() + t.size()) {
    std::ostringstream msg;
    msg << "unparsable " << column << " value '" << std::string(t)
        << "' at row " << row;
    throw data_error(msg.str());
  }
  return out;
}

long long parse_label(std::string_view token, std::size_t row) {
  const std::string_view t = trim(token);
  long long out{};
  const auto result = std::from_chars(t.data(), t.data() + t.size(), out);
  if (result.ec != std::errc{} || result.ptr != t.data() + t.size()) {
    std::ostringstream msg;
    msg << "unparsable year value '" << std::string(t) << "' at row " << row;
    throw data_error(msg.str());
  }
  return out;
}

void check_positive(double value, const std::string& column, std::size_t row) {
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << column << " value '" << value << "' at row " << row
        << " must be positive";
    throw data_error(msg.str());
  }
}

}  // namespace

AnnualSeries parse_series(std::string_view text, const CsvOptions& options) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw data_error("empty input, expected a header row");

  const std::string_view header_line = lines.front();
  const char delimiter = options.delimiter.value_or(
      header_line.find('\t') != std::string_view::npos ? '\t' : ',');

  const std::vector<std::string_view> header = split(header_line, delimiter);
  constexpr int kUnset = -1;
  int col_year = kUnset, col_consumption = kUnset, col_equity = kUnset,
      col_rf = kUnset, col_dividends = kUnset;
  auto bind = [](int& slot, int index, const std::string& name) {
    if (slot != kUnset) throw data_error("duplicate column " + name);
    slot = index;
  };
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name(trim(header[i]));
    const int index = static_cast<int>(i);
    if (name == "year") bind(col_year, index, name);
    else if (name == "consumption") bind(col_consumption, index, name);
    else if (name == "equity_return") bind(col_equity, index, name);
    else if (name == "rf_return") bind(col_rf, index, name);
    else if (name == "dividends") bind(col_dividends, index, name);
    // Unknown columns are ignored.
  }
  if (col_consumption == kUnset)
    throw data_error("missing required column consumption");

  AnnualSeries series;
  if (col_equity != kUnset) series.equity_return.emplace();
  if (col_rf != kUnset) series.risk_free_return.emplace();
  if (col_dividends != kUnset) series.dividends.emplace();

  for (std::size_t line_index = 1; line_index < lines.size(); ++line_index) {
    const std::size_t row = line_index;  // 1-based data row
    if (trim(lines[line_index]).empty()) {
      std::ostringstream msg;
      msg << "blank line at row " << row;
      throw data_error(msg.str());
    }
    const std::vector<std::string_view> fields =
        split(lines[line_index], delimiter);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << "row " << row << " has " << fields.size() << " fields, expected "
          << header.size();
      throw data_error(msg.str());
    }
    const double consumption =
        parse_double(fields[col_consumption], "consumption", row);
    check_positive(consumption, "consumption", row);
    series.consumption.push_back(consumption);
    series.periods.push_back(col_year != kUnset
                                 ? parse_label(fields[col_year], row)
                                 : static_cast<long long>(row - 1));
    if (col_equity != kUnset) {
      const double value = parse_double(fields[col_equity], "equity_return", row);
      check_positive(value, "equity_return", row);
      series.equity_return->push_back(value);
    }
    if (col_rf != kUnset) {
      const double value = parse_double(fields[col_rf], "rf_return", row);
      check_positive(value, "rf_return", row);
      series.risk_free_return->push_back(value);
    }
    if (col_dividends != kUnset) {
      const double value = parse_double(fields[col_dividends], "dividends", row);
      check_positive(value, "dividends", row);
      series.dividends->push_back(value);
    }
  }

  if (series.consumption.size() < 2) {
    std::ostringstream msg;
    msg << "need at least two data rows, found " << series.consumption.size();
    throw data_error(msg.str());
  }
  for (std::size_t i = 1; i < series.periods.size(); ++i) {
    if (series.periods[i] <= series.periods[i - 1]) {
      std::ostringstream msg;
      msg << "year values must be strictly increasing at row " << i + 1;
      throw data_error(msg.str());
    }
  }
  series.validate();
  return series;
}

AnnualSeries load_series(const std::filesystem::path& path,
                         const CsvOptions& options) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw data_error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_series(buffer.str(), options);
}

}  // namespace sfcapm
