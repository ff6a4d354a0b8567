#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lossrj {

/// Raised for malformed user input (data files, configuration values).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Observation {
    int year = 0;
    double loss = 0.0;
    double exposure = 1.0;
};

/// Loss-ratio series R_j = L_j / E_j in time order. Immutable once built.
class ObservationSeries {
public:
    ObservationSeries() = default;

    /// Rows are taken as time order. Throws InputError naming the offending
    /// row for a nonpositive exposure, and for fewer than two rows.
    static ObservationSeries from_rows(std::span<const Observation> rows);

    /// Builds a series from ratios; losses are back-filled as ratio * exposure.
    static ObservationSeries from_ratios(std::vector<int> years,
                                         std::vector<double> ratios,
                                         std::vector<double> exposures);

    std::size_t size() const { return ratios_.size(); }
    std::span<const int> years() const { return years_; }
    std::span<const double> losses() const { return losses_; }
    std::span<const double> exposures() const { return exposures_; }
    std::span<const double> ratios() const { return ratios_; }

    double ratio(std::size_t j) const { return ratios_[j]; }
    double exposure(std::size_t j) const { return exposures_[j]; }
    double mean_ratio() const;

private:
    std::vector<int> years_;
    std::vector<double> losses_;
    std::vector<double> exposures_;
    std::vector<double> ratios_;
};

ObservationSeries load_series(std::span<const Observation> rows);

/// CSV with header `year,loss,exposure`.
ObservationSeries read_series_csv(std::istream& in);
ObservationSeries read_series_csv(const std::filesystem::path& path);
void write_series_csv(std::ostream& out, const ObservationSeries& series);

} // namespace lossrj
