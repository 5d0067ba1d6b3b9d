#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "setflex/taxa.hpp"

namespace setflex {

/// A sub-collection of a set system, as strictly increasing member positions.
class SubsetSelection {
public:
    SubsetSelection() = default;

    explicit SubsetSelection(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
        std::sort(indices_.begin(), indices_.end());
        if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
            throw InputError("subset selection lists a member twice");
    }

    static SubsetSelection all(std::size_t n) {
        SubsetSelection s;
        s.indices_.resize(n);
        for (std::size_t i = 0; i < n; ++i) s.indices_[i] = i;
        return s;
    }

    static SubsetSelection from_mask(std::uint64_t mask) {
        SubsetSelection s;
        for (std::size_t i = 0; mask; ++i, mask >>= 1)
            if (mask & 1u) s.indices_.push_back(i);
        return s;
    }

    std::uint64_t mask() const {
        std::uint64_t m = 0;
        for (auto i : indices_) {
            if (i >= 64) throw InputError("selection too large for a bit mask");
            m |= std::uint64_t{1} << i;
        }
        return m;
    }

    const std::vector<std::size_t>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    auto begin() const { return indices_.begin(); }
    auto end() const { return indices_.end(); }

    void check_range(std::size_t member_count) const {
        if (!indices_.empty() && indices_.back() >= member_count)
            throw InputError("selection index " + std::to_string(indices_.back()) +
                             " out of range (system has " + std::to_string(member_count) +
                             " members)");
    }

    SubsetSelection united(const SubsetSelection& o) const {
        SubsetSelection s;
        std::set_union(begin(), end(), o.begin(), o.end(), std::back_inserter(s.indices_));
        return s;
    }

    SubsetSelection intersected(const SubsetSelection& o) const {
        SubsetSelection s;
        std::set_intersection(begin(), end(), o.begin(), o.end(), std::back_inserter(s.indices_));
        return s;
    }

    bool intersects(const SubsetSelection& o) const { return !intersected(o).empty(); }

    auto operator<=>(const SubsetSelection&) const = default;

private:
    std::vector<std::size_t> indices_;
};

enum class Method { exhaustive, mincut, bruteforce, forest };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::exhaustive: return "exhaustive";
        case Method::mincut: return "mincut";
        case Method::bruteforce: return "bruteforce";
        case Method::forest: return "forest";
    }
    return "?";
}

/// A vertex of the set-vs-taxon incidence graph: a member position or a taxon id.
struct IncidenceVertex {
    bool is_member = false;
    int index = 0;
    auto operator<=>(const IncidenceVertex&) const = default;
};

/// Precedence choices (first precedes second) plus the directed cycle they force.
struct OrderWitness {
    std::vector<std::pair<TaxonId, TaxonId>> orientation;
    std::vector<TaxonId> cycle;
};

using Certificate =
    std::variant<std::monostate, SubsetSelection, std::vector<IncidenceVertex>, OrderWitness>;

/// Verdict of a decision procedure plus a certificate that a library call can re-check.
///
/// For thin/slim checks `value` carries the minimum of the measure that was
/// optimised (minimal excess for exhaustive scans, sigma*/gamma* for min-cut).
struct CheckReport {
    bool verdict = false;
    Method method = Method::exhaustive;
    std::optional<long long> value;
    Certificate certificate;
    std::vector<std::string> notes;
    std::map<std::string, long long> stats;

    const SubsetSelection* witness() const { return std::get_if<SubsetSelection>(&certificate); }
};

}  // namespace setflex
