#include "datalens/harness/detection.hpp"

#include <algorithm>
#include <cmath>

#include "datalens/common/error.hpp"

namespace datalens::harness {

namespace {

void check_permutation(std::span<const std::size_t> ranking, std::size_t n) {
    require(ranking.size() == n, Error::Kind::config,
            "ranking length " + std::to_string(ranking.size()) +
                " does not match flip mask length " + std::to_string(n));
    std::vector<std::uint8_t> seen(n, 0);
    for (std::size_t i : ranking) {
        require(i < n && !seen[i], Error::Kind::config,
                "ranking is not a permutation of 0.." + std::to_string(n - 1));
        seen[i] = 1;
    }
}

std::size_t count_flips(std::span<const std::uint8_t> mask) {
    std::size_t c = 0;
    for (auto f : mask) c += f ? 1 : 0;
    return c;
}

} // namespace

std::vector<std::uint8_t> train_flip_mask(const data::TimeSeriesDataset& ds) {
    std::vector<std::uint8_t> mask;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds.split[i] == data::Split::train) mask.push_back(ds.flip_mask[i]);
    return mask;
}

std::size_t inspected_count(double ratio, std::size_t n) {
    require(ratio > 0.0 && ratio <= 1.0, Error::Kind::config,
            "inspection ratio must be in (0, 1]");
    // shave one ulp-ish so 0.1 * 4500 = 450.0000000000001 still counts as 450
    const double scaled = ratio * static_cast<double>(n) * (1.0 - 1e-12);
    auto k = static_cast<std::size_t>(std::ceil(scaled));
    if (k > n) k = n;
    if (k == 0) k = 1;
    return k;
}

double detection_rate(std::span<const std::size_t> ranking,
                      std::span<const std::uint8_t> flip_mask, double ratio) {
    check_permutation(ranking, flip_mask.size());
    const std::size_t flips = count_flips(flip_mask);
    require(flips > 0, Error::Kind::config,
            "detection_rate is undefined without flipped labels");

    const std::size_t k = inspected_count(ratio, flip_mask.size());
    std::size_t detected = 0;
    for (std::size_t pos = 0; pos < k; ++pos)
        if (flip_mask[ranking[pos]]) ++detected;
    return static_cast<double>(detected) / static_cast<double>(flips);
}

std::vector<InspectionResult> inspection_curve(std::span<const std::size_t> ranking,
                                               std::span<const std::uint8_t> flip_mask,
                                               std::span<const double> ratios) {
    check_permutation(ranking, flip_mask.size());
    const std::size_t flips = count_flips(flip_mask);
    require(flips > 0, Error::Kind::config,
            "inspection_curve is undefined without flipped labels");

    // prefix flip counts make every ratio a single lookup
    std::vector<std::size_t> prefix(flip_mask.size() + 1, 0);
    for (std::size_t pos = 0; pos < ranking.size(); ++pos)
        prefix[pos + 1] = prefix[pos] + (flip_mask[ranking[pos]] ? 1 : 0);

    std::vector<InspectionResult> out;
    out.reserve(ratios.size());
    for (double r : ratios) {
        InspectionResult res;
        res.ratio = r;
        res.inspected = inspected_count(r, flip_mask.size());
        res.detected = prefix[res.inspected];
        res.rate = static_cast<double>(res.detected) / static_cast<double>(flips);
        out.push_back(res);
    }
    return out;
}

DetectionDiff detection_diff(std::span<const NamedRanking> rankings,
                             std::span<const std::uint8_t> flip_mask, double ratio,
                             std::size_t window_lo, std::size_t window_hi) {
    require(!rankings.empty(), Error::Kind::config, "detection_diff: no rankings");
    require(window_lo <= window_hi && window_hi <= flip_mask.size(), Error::Kind::config,
            "detection_diff: bad index window");

    DetectionDiff diff;
    for (std::size_t i = window_lo; i < window_hi; ++i)
        if (flip_mask[i]) diff.flip_indices.push_back(i);

    const std::size_t k = inspected_count(ratio, flip_mask.size());
    for (const NamedRanking& r : rankings) {
        check_permutation(r.order, flip_mask.size());
        diff.methods.push_back(r.name);
        std::vector<std::uint8_t> in_prefix(flip_mask.size(), 0);
        for (std::size_t pos = 0; pos < k; ++pos) in_prefix[r.order[pos]] = 1;
        for (std::size_t i : diff.flip_indices) diff.detected.push_back(in_prefix[i]);
    }

    // transpose bookkeeping: loops above appended column-major, flip to row-major
    std::vector<std::uint8_t> rows(diff.detected.size());
    const std::size_t nf = diff.flip_indices.size();
    const std::size_t nm = diff.methods.size();
    for (std::size_t m = 0; m < nm; ++m)
        for (std::size_t f = 0; f < nf; ++f) rows[f * nm + m] = diff.detected[m * nf + f];
    diff.detected = std::move(rows);
    return diff;
}

} // namespace datalens::harness
