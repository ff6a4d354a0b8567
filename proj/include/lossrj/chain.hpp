#pragma once

#include "lossrj/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace lossrj {

struct ChainConfig {
    std::size_t iterations = 10000;
    std::size_t burn_in = 0;
    std::uint64_t seed = 1;
    std::size_t thin = 1;

    void validate() const;
    /// floor((iterations - burn_in) / thin)
    std::size_t retained_count() const;
    /// Iteration i (1-based) is retained iff i > burn_in and (i - burn_in) % thin == 0.
    bool retains(std::size_t iteration) const;
};

struct Snapshot {
    std::size_t iteration = 0;
    ParamState state;

    bool operator==(const Snapshot&) const = default;
};

/// Thinned trace of a sampler run. Samplers that integrate out the precisions
/// leave sigma and tau as kAbsent in every snapshot.
struct ChainRecord {
    std::size_t n = 0;
    std::vector<Snapshot> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    std::vector<ModelId> model_sequence() const;
    /// Parameter trace; NaN where the parameter does not exist in the sample's model.
    std::vector<double> trace(std::string_view name) const;
    /// Values of the parameter at iterations where the sample is in `model`.
    std::vector<double> trace_in_model(std::string_view name, ModelId model) const;

    bool operator==(const ChainRecord&) const = default;
};

/// `iteration,model,alpha0,alpha1,...,alphan,rho,eta,sigma,tau`; cells are
/// empty for parameters absent from the sample's model.
void write_chain_csv(std::ostream& out, const ChainRecord& chain);
ChainRecord read_chain_csv(std::istream& in);

} // namespace lossrj
