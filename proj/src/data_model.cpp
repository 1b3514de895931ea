#include "cdid/data_model.hpp"

#include "cdid/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace cdid {

Dataset::Dataset(std::vector<CrossSection> sections) {
  if (sections.size() < 2) {
    throw Error(ErrorKind::invalid_input, "dataset needs at least 2 periods, got " +
                                              std::to_string(sections.size()));
  }
  std::sort(sections.begin(), sections.end(),
            [](const CrossSection& a, const CrossSection& b) { return a.period < b.period; });
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto& s = sections[i];
    if (i > 0 && sections[i - 1].period == s.period) {
      throw Error(ErrorKind::invalid_input, "duplicate period label " + std::to_string(s.period));
    }
    if (s.outcomes.size() != s.treatments.size()) {
      throw Error(ErrorKind::invalid_input,
                  "period " + std::to_string(s.period) + ": outcome/treatment length mismatch");
    }
    if (s.outcomes.size() == 0) {
      throw Error(ErrorKind::invalid_input, "period " + std::to_string(s.period) + " is empty");
    }
    if (!s.outcomes.allFinite() || !s.treatments.allFinite()) {
      throw Error(ErrorKind::invalid_input,
                  "period " + std::to_string(s.period) + " contains non-finite values");
    }
  }
  original_labels_.reserve(sections.size());
  for (std::size_t i = 0; i < sections.size(); ++i) {
    original_labels_.push_back(sections[i].period);
    sections[i].period = static_cast<int>(i) + 1;
  }
  sections_ = std::move(sections);
}

const CrossSection& Dataset::period(int t) const {
  if (t < 1 || t > periods()) {
    throw Error(ErrorKind::invalid_input, "period " + std::to_string(t) + " not in 1.." +
                                              std::to_string(periods()));
  }
  return sections_[static_cast<std::size_t>(t - 1)];
}

int Dataset::original_label(int t) const {
  period(t);
  return original_labels_[static_cast<std::size_t>(t - 1)];
}

Index count_treatment_ties(const CrossSection& section) {
  std::vector<double> x(section.treatments.begin(), section.treatments.end());
  std::sort(x.begin(), x.end());
  Index ties = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    bool left = i > 0 && x[i - 1] == x[i];
    bool right = i + 1 < x.size() && x[i + 1] == x[i];
    if (left || right) ++ties;
  }
  return ties;
}

std::vector<std::string> Dataset::diagnostics() const {
  std::vector<std::string> notes;
  for (const auto& s : sections_) {
    if (Index ties = count_treatment_ties(s); ties > 0) {
      notes.push_back("period " + std::to_string(s.period) + ": " + std::to_string(ties) +
                      " tied treatment values (continuous treatment assumed)");
    }
  }
  return notes;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

double parse_cell(const std::string& raw, const std::string& column, std::size_t row,
                  const std::string& source) {
  std::string cell = trim(raw);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorKind::invalid_input, source + ": row " + std::to_string(row) +
                                              ": non-numeric value '" + cell + "' in column '" +
                                              column + "'");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::invalid_input, source + ": row " + std::to_string(row) +
                                              ": non-finite value in column '" + column + "'");
  }
  return value;
}

std::ptrdiff_t find_column(const std::vector<std::string>& header, const std::string& name,
                           const std::string& source, bool required) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return static_cast<std::ptrdiff_t>(i);
  }
  if (required) {
    throw Error(ErrorKind::invalid_input, source + ": missing column '" + name + "'");
  }
  return -1;
}

struct Columns {
  std::vector<double> y, x;
};

// Reads rows into per-label columns. When period_col < 0 every row gets `fixed_label`.
std::map<int, Columns> read_rows(std::istream& in, const CsvSchema& schema,
                                 const std::string& source, bool with_period, int fixed_label) {
  std::string line;
  if (!read_line(in, line)) throw Error(ErrorKind::invalid_input, source + ": empty file");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);
  auto header = split_row(line);
  auto pcol = with_period ? find_column(header, schema.period, source, true) : -1;
  auto ycol = find_column(header, schema.outcome, source, true);
  auto xcol = find_column(header, schema.treatment, source, true);

  std::map<int, Columns> by_label;
  std::size_t row = 1;
  while (read_line(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::invalid_input, source + ": row " + std::to_string(row) + ": expected " +
                                                std::to_string(header.size()) + " fields, got " +
                                                std::to_string(cells.size()));
    }
    int label = fixed_label;
    if (pcol >= 0) {
      double p = parse_cell(cells[static_cast<std::size_t>(pcol)], schema.period, row, source);
      if (p != std::floor(p) || std::abs(p) > 1e9) {
        throw Error(ErrorKind::invalid_input,
                    source + ": row " + std::to_string(row) + ": period must be an integer");
      }
      label = static_cast<int>(p);
    }
    auto& col = by_label[label];
    col.y.push_back(parse_cell(cells[static_cast<std::size_t>(ycol)], schema.outcome, row, source));
    col.x.push_back(parse_cell(cells[static_cast<std::size_t>(xcol)], schema.treatment, row, source));
  }
  return by_label;
}

CrossSection to_section(int label, const Columns& c) {
  CrossSection s;
  s.period = label;
  s.outcomes = Eigen::Map<const Vector>(c.y.data(), static_cast<Index>(c.y.size()));
  s.treatments = Eigen::Map<const Vector>(c.x.data(), static_cast<Index>(c.x.size()));
  return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
  auto rows = read_rows(in, schema, source, true, 0);
  if (rows.size() < 2) {
    throw Error(ErrorKind::invalid_input,
                source + ": need at least 2 distinct periods, found " + std::to_string(rows.size()));
  }
  std::vector<CrossSection> sections;
  for (const auto& [label, cols] : rows) sections.push_back(to_section(label, cols));
  return Dataset(std::move(sections));
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  auto in = open_input(path);
  return parse_csv(in, schema, path.string());
}

Dataset load_csv_pair(const std::filesystem::path& first, const std::filesystem::path& reference,
                      const CsvSchema& schema) {
  std::vector<CrossSection> sections;
  int label = 1;
  for (const auto& path : {first, reference}) {
    auto in = open_input(path);
    auto rows = read_rows(in, schema, path.string(), false, label);
    if (rows.empty()) {
      throw Error(ErrorKind::invalid_input, path.string() + ": no observations");
    }
    sections.push_back(to_section(label, rows.begin()->second));
    ++label;
  }
  return Dataset(std::move(sections));
}

void write_csv(std::ostream& out, const Dataset& data, const CsvSchema& schema) {
  out << schema.period << ',' << schema.outcome << ',' << schema.treatment << '\n';
  char buf[64];
  for (const auto& s : data.sections()) {
    int label = data.original_label(s.period);
    for (Index i = 0; i < s.size(); ++i) {
      out << label << ',';
      std::snprintf(buf, sizeof buf, "%.17g", s.outcomes[i]);
      out << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", s.treatments[i]);
      out << buf << '\n';
    }
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data, const CsvSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  write_csv(out, data, schema);
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
}

namespace {

// Sums in sorted order so the result does not depend on row order.
void moments(Vector v, double& mean, double& sd, double& lo, double& hi) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  mean = v.mean();
  sd = v.size() > 1 ? std::sqrt((v.array() - mean).square().sum() / (n - 1.0)) : 0.0;
  lo = v.minCoeff();
  hi = v.maxCoeff();
}

}  // namespace

std::vector<PeriodSummary> summarize(const Dataset& data) {
  if (data.periods() == 0) throw Error(ErrorKind::invalid_input, "empty dataset");
  std::vector<PeriodSummary> out;
  for (const auto& s : data.sections()) {
    PeriodSummary p;
    p.period = data.original_label(s.period);
    p.n = s.size();
    moments(s.outcomes, p.y_mean, p.y_sd, p.y_min, p.y_max);
    moments(s.treatments, p.x_mean, p.x_sd, p.x_min, p.x_max);
    out.push_back(p);
  }
  return out;
}

CrossSection resample(const CrossSection& section, Rng& rng) {
  const Index n = section.size();
  CrossSection out;
  out.period = section.period;
  out.outcomes.resize(n);
  out.treatments.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto j = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
    out.outcomes[i] = section.outcomes[j];
    out.treatments[i] = section.treatments[j];
  }
  return out;
}

}  // namespace cdid
