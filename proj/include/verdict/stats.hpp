#pragma once
// Exact-fraction summary statistics. Accuracies stay rational all the way
// through max/min/avg/median/differencing; rounding to two-decimal percents
// happens only at the output edge. This is the convention that makes
// max-min rows reproducible (e.g. 5/109 -> 4.59, not 73.39 - 68.81 = 4.58).

#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "verdict/votes.hpp"

namespace verdict {

using Frac = boost::rational<long long>;

inline Frac accuracy_frac(const EvaluationResult& r) { return Frac(r.correct, r.total); }

// round(f * 100, 2) half away from zero, as integer hundredths of a percent.
long long frac_percent_hundredths(const Frac& f);

// Formatted two-decimal percent, e.g. "70.64".
std::string frac_percent_str(const Frac& f);

struct FracStats {
    Frac max{0};
    Frac min{0};
    Frac max_minus_min{0};
    Frac avg{0};
    Frac median{0};  // even count: mean of the two middle values
};

// Throws InvalidArgument on an empty list.
FracStats frac_stats(std::vector<Frac> values);

}  // namespace verdict
