#pragma once

#include "cdid/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cdid {

/// One period's repeated cross-section: paired outcome/treatment draws.
struct CrossSection {
  int period = 0;
  Vector outcomes;
  Vector treatments;

  Index size() const { return outcomes.size(); }
};

/// Periods of a repeated cross-section study, relabeled 1..T in the order of
/// their original labels. The last period is the reference period T.
class Dataset {
public:
  Dataset() = default;

  /// Validates and relabels. Requires >= 2 sections with distinct labels,
  /// each nonempty, equal-length and finite.
  explicit Dataset(std::vector<CrossSection> sections);

  int periods() const { return static_cast<int>(sections_.size()); }
  int reference_period() const { return periods(); }

  /// Section for internal label t in 1..T.
  const CrossSection& period(int t) const;
  const CrossSection& reference() const { return sections_.back(); }

  /// Label the section carried before relabeling.
  int original_label(int t) const;

  const std::vector<CrossSection>& sections() const { return sections_; }

  /// Human-readable notes, e.g. tied treatment values.
  std::vector<std::string> diagnostics() const;

private:
  std::vector<CrossSection> sections_;
  std::vector<int> original_labels_;
};

struct CsvSchema {
  std::string period = "period";
  std::string outcome = "y";
  std::string treatment = "x";
};

/// Parses a long-format CSV (one row per observation, header required).
Dataset parse_csv(std::istream& in, const CsvSchema& schema = {},
                  const std::string& source = "<stream>");
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Two-file variant: one file per period without a period column. The first
/// file becomes period 1, the second the reference period 2.
Dataset load_csv_pair(const std::filesystem::path& first, const std::filesystem::path& reference,
                      const CsvSchema& schema = {});

/// Writes `period,y,x` (schema names) with 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data, const CsvSchema& schema = {});
void save_csv(const std::filesystem::path& path, const Dataset& data, const CsvSchema& schema = {});

struct PeriodSummary {
  int period = 0;
  Index n = 0;
  double y_mean = 0, y_sd = 0, y_min = 0, y_max = 0;
  double x_mean = 0, x_sd = 0, x_min = 0, x_max = 0;
};

/// Per-period moments. sd uses the n-1 denominator (0 when n == 1).
std::vector<PeriodSummary> summarize(const Dataset& data);

/// Number of treatment values that equal another value in the same section.
Index count_treatment_ties(const CrossSection& section);

class Rng;

/// Draws section.size() rows with replacement.
CrossSection resample(const CrossSection& section, Rng& rng);

}  // namespace cdid
