#include "srda/param_store.hpp"

#include <cmath>
#include <cstring>

namespace srda {

ParamSegment& ParamStore::add(std::string name, std::size_t rows, std::size_t cols) {
    if (find(name) != nullptr) throw InvalidInput("ParamStore: duplicate segment " + name);
    ParamSegment seg;
    seg.name = std::move(name);
    seg.rows = rows;
    seg.cols = cols;
    seg.values.assign(rows * cols, 0.0);
    seg.grads.assign(rows * cols, 0.0);
    segments_.push_back(std::move(seg));
    return segments_.back();
}

ParamSegment* ParamStore::find(std::string_view name) {
    for (auto& s : segments_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::size_t ParamStore::param_count() const {
    std::size_t n = 0;
    for (const auto& s : segments_) n += s.size();
    return n;
}

void ParamStore::zero_grads() {
    for (auto& s : segments_) std::fill(s.grads.begin(), s.grads.end(), 0.0);
}

bool ParamStore::values_finite() const {
    for (const auto& s : segments_)
        for (double v : s.values)
            if (!std::isfinite(v)) return false;
    return true;
}

bool ParamStore::grads_finite() const {
    for (const auto& s : segments_)
        for (double g : s.grads)
            if (!std::isfinite(g)) return false;
    return true;
}

std::uint64_t ParamStore::value_checksum() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](const void* p, std::size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001B3ULL;
        }
    };
    for (const auto& s : segments_) {
        mix(s.values.data(), s.values.size() * sizeof(double));
    }
    return h;
}

} // namespace srda
