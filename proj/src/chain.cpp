#include "lossrj/chain.hpp"

#include "lossrj/format.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lossrj {

void ChainConfig::validate() const {
    if (iterations == 0) throw InputError("iterations must be positive");
    if (burn_in >= iterations) throw InputError("burn_in must be smaller than iterations");
    if (thin == 0) throw InputError("thin must be at least 1");
}

std::size_t ChainConfig::retained_count() const { return (iterations - burn_in) / thin; }

bool ChainConfig::retains(std::size_t iteration) const {
    return iteration > burn_in && (iteration - burn_in) % thin == 0;
}

std::vector<ModelId> ChainRecord::model_sequence() const {
    std::vector<ModelId> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.state.model);
    return out;
}

std::vector<double> ChainRecord::trace(std::string_view name) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(parameter_value(s.state, name).value_or(kAbsent));
    return out;
}

std::vector<double> ChainRecord::trace_in_model(std::string_view name, ModelId model) const {
    std::vector<double> out;
    for (const auto& s : samples) {
        if (s.state.model != model) continue;
        if (auto v = parameter_value(s.state, name)) out.push_back(*v);
    }
    return out;
}

namespace {

void write_cell(std::ostream& out, double v, bool present) {
    out << ',';
    if (present && !std::isnan(v)) out << format_double(v);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell) {
    if (cell.empty()) return kAbsent;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw InputError("chain csv: cannot parse '" + cell + "'");
    }
    return v;
}

} // namespace

void write_chain_csv(std::ostream& out, const ChainRecord& chain) {
    out << "iteration,model";
    for (const auto& name : all_parameter_names(chain.n)) out << ',' << name;
    out << '\n';
    for (const auto& s : chain.samples) {
        const auto& st = s.state;
        out << s.iteration << ',' << static_cast<int>(st.model);
        write_cell(out, st.alpha0, has_alpha0(st.model));
        for (double a : st.alpha) write_cell(out, a, true);
        write_cell(out, st.process_rho(), true);
        write_cell(out, st.eta, has_eta(st.model));
        write_cell(out, st.sigma, true);
        write_cell(out, st.tau, true);
        out << '\n';
    }
}

ChainRecord read_chain_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("chain csv: empty input");
    const auto header = split(line);
    if (header.size() < 8 || header[0] != "iteration" || header[1] != "model") {
        throw InputError("chain csv: unexpected header");
    }
    ChainRecord chain;
    chain.n = header.size() - 7;
    if (header != [&] {
            std::vector<std::string> h{"iteration", "model"};
            for (auto& name : all_parameter_names(chain.n)) h.push_back(name);
            return h;
        }()) {
        throw InputError("chain csv: unexpected header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) throw InputError("chain csv: ragged row");
        Snapshot snap;
        snap.iteration = static_cast<std::size_t>(std::stoull(cells[0]));
        snap.state.model = parse_model(cells[1]);
        snap.state.alpha0 = parse_cell(cells[2]);
        snap.state.alpha.resize(chain.n);
        for (std::size_t j = 0; j < chain.n; ++j) snap.state.alpha[j] = parse_cell(cells[3 + j]);
        snap.state.rho = parse_cell(cells[3 + chain.n]);
        snap.state.eta = parse_cell(cells[4 + chain.n]);
        snap.state.sigma = parse_cell(cells[5 + chain.n]);
        snap.state.tau = parse_cell(cells[6 + chain.n]);
        chain.samples.push_back(std::move(snap));
    }
    return chain;
}

} // namespace lossrj
