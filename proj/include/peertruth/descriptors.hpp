#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "peertruth/errors.hpp"

namespace peertruth {

// Publicly observable item features: numeric channels (word count, citation
// count, author reputation) and categorical channels (field, stage, flags).
struct DescriptorVector {
    std::vector<double> numeric;
    std::vector<int> categorical;
};

struct DescriptorSchema {
    std::size_t numeric_count = 0;
    std::vector<int> categorical_cardinalities;

    std::size_t feature_count() const {
        return numeric_count + categorical_cardinalities.size();
    }

    bool matches(const DescriptorVector& d) const {
        if (d.numeric.size() != numeric_count) return false;
        if (d.categorical.size() != categorical_cardinalities.size()) return false;
        for (double v : d.numeric) {
            if (!std::isfinite(v)) return false;
        }
        for (std::size_t i = 0; i < d.categorical.size(); ++i) {
            if (d.categorical[i] < 0 || d.categorical[i] >= categorical_cardinalities[i]) {
                return false;
            }
        }
        return true;
    }

    void require(const DescriptorVector& d) const {
        if (!matches(d)) throw SchemaMismatch("descriptor vector does not match schema");
    }

    bool operator==(const DescriptorSchema& other) const {
        return numeric_count == other.numeric_count &&
               categorical_cardinalities == other.categorical_cardinalities;
    }
};

}  // namespace peertruth
