#include "fabric3d/arch.h"

#include <set>

namespace fabric3d {

// Pattern-free types (CB, CB-O) contribute one configuration each. Every
// pattern-bearing type multiplies the percentage levels by the choices for
// the eight pattern integers (four input, four output).
boost::multiprecision::cpp_int count_design_space(const DesignSpaceBounds &bounds)
{
    using boost::multiprecision::cpp_int;

    std::set<ConnectionType> types(bounds.types.begin(), bounds.types.end());
    std::set<int> pcts(bounds.percentages.begin(), bounds.percentages.end());
    cpp_int range = bounds.index_hi >= bounds.index_lo ? cpp_int(bounds.index_hi - bounds.index_lo + 1) : cpp_int(0);

    cpp_int per_type = cpp_int(pcts.size()) * boost::multiprecision::pow(range, 8);
    cpp_int total = 0;
    for (ConnectionType t : types) {
        if (t == ConnectionType::CB || t == ConnectionType::CBO)
            total += 1;
        else if (pattern_bearing(t))
            total += per_type;
    }
    return total;
}

} // namespace fabric3d
