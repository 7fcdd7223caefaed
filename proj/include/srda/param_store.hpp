#ifndef SRDA_PARAM_STORE_HPP
#define SRDA_PARAM_STORE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "srda/error.hpp"

namespace srda {

/// One named block of parameters (a layer's weights or biases) together
/// with its gradient buffer of identical shape.
struct ParamSegment {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<double> grads;

    std::size_t size() const { return values.size(); }
};

/// Ordered collection of ParamSegments for one network.
class ParamStore {
public:
    ParamSegment& add(std::string name, std::size_t rows, std::size_t cols);

    std::size_t segment_count() const { return segments_.size(); }
    ParamSegment& segment(std::size_t i) { return segments_[i]; }
    const ParamSegment& segment(std::size_t i) const { return segments_[i]; }
    ParamSegment* find(std::string_view name);

    /// Total number of scalar parameters.
    std::size_t param_count() const;

    /// Sets every gradient entry to exactly 0.
    void zero_grads();

    bool values_finite() const;
    bool grads_finite() const;

    /// FNV-1a over the raw value bytes; detects any bit-level change.
    std::uint64_t value_checksum() const;

    auto begin() { return segments_.begin(); }
    auto end() { return segments_.end(); }
    auto begin() const { return segments_.begin(); }
    auto end() const { return segments_.end(); }

private:
    std::vector<ParamSegment> segments_;
};

} // namespace srda

#endif
