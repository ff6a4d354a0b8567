#include "lossrj/series.hpp"

#include "lossrj/format.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace lossrj {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& text, std::size_t row, const char* column) {
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw InputError("row " + std::to_string(row) + ": cannot parse " + column + " '" +
                         text + "'");
    }
    return value;
}

} // namespace

ObservationSeries ObservationSeries::from_rows(std::span<const Observation> rows) {
    if (rows.size() < 2) {
        throw InputError("series needs at least 2 rows, got " + std::to_string(rows.size()));
    }
    ObservationSeries s;
    s.years_.reserve(rows.size());
    s.losses_.reserve(rows.size());
    s.exposures_.reserve(rows.size());
    s.ratios_.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!(r.exposure > 0.0)) {
            throw InputError("row " + std::to_string(i + 1) + ": exposure must be positive, got " +
                             format_double(r.exposure));
        }
        s.years_.push_back(r.year);
        s.losses_.push_back(r.loss);
        s.exposures_.push_back(r.exposure);
        s.ratios_.push_back(r.loss / r.exposure);
    }
    return s;
}

ObservationSeries ObservationSeries::from_ratios(std::vector<int> years,
                                                 std::vector<double> ratios,
                                                 std::vector<double> exposures) {
    if (ratios.size() != exposures.size() || years.size() != ratios.size()) {
        throw std::invalid_argument("from_ratios: mismatched lengths");
    }
    if (ratios.size() < 2) {
        throw InputError("series needs at least 2 rows, got " + std::to_string(ratios.size()));
    }
    ObservationSeries s;
    s.losses_.resize(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(exposures[i] > 0.0)) {
            throw InputError("row " + std::to_string(i + 1) + ": exposure must be positive");
        }
        s.losses_[i] = ratios[i] * exposures[i];
    }
    s.years_ = std::move(years);
    s.ratios_ = std::move(ratios);
    s.exposures_ = std::move(exposures);
    return s;
}

double ObservationSeries::mean_ratio() const {
    if (ratios_.empty()) return 0.0;
    return std::accumulate(ratios_.begin(), ratios_.end(), 0.0) /
           static_cast<double>(ratios_.size());
}

ObservationSeries load_series(std::span<const Observation> rows) {
    return ObservationSeries::from_rows(rows);
}

ObservationSeries read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty data file");
    const auto header = split_csv_line(line);
    if (header != std::vector<std::string>{"year", "loss", "exposure"}) {
        throw InputError("data header must be 'year,loss,exposure', got '" + trim(line) + "'");
    }
    std::vector<Observation> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_csv_line(line);
        if (cells.size() != 3) {
            throw InputError("row " + std::to_string(row) + ": expected 3 fields, got " +
                             std::to_string(cells.size()));
        }
        Observation obs;
        obs.year = static_cast<int>(parse_double(cells[0], row, "year"));
        obs.loss = parse_double(cells[1], row, "loss");
        obs.exposure = parse_double(cells[2], row, "exposure");
        rows.push_back(obs);
    }
    return ObservationSeries::from_rows(rows);
}

ObservationSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open data file " + path.string());
    return read_series_csv(in);
}

void write_series_csv(std::ostream& out, const ObservationSeries& series) {
    out << "year,loss,exposure\n";
    for (std::size_t j = 0; j < series.size(); ++j) {
        out << series.years()[j] << ',' << format_double(series.losses()[j]) << ','
            << format_double(series.exposures()[j]) << '\n';
    }
}

} // namespace lossrj
