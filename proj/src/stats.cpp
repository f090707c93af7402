#include "verdict/stats.hpp"

#include <algorithm>

#include "verdict/errors.hpp"

namespace verdict {

long long frac_percent_hundredths(const Frac& f) {
    return percent_hundredths(f.numerator(), f.denominator());
}

std::string frac_percent_str(const Frac& f) {
    return format_hundredths(frac_percent_hundredths(f));
}

FracStats frac_stats(std::vector<Frac> values) {
    if (values.empty()) throw InvalidArgument("stats over an empty list");
    std::sort(values.begin(), values.end());

    FracStats out;
    out.min = values.front();
    out.max = values.back();
    out.max_minus_min = out.max - out.min;

    Frac sum{0};
    for (const Frac& v : values) sum += v;
    out.avg = sum / static_cast<long long>(values.size());

    const std::size_t n = values.size();
    out.median = (n % 2 == 1) ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
    return out;
}

}  // namespace verdict
