#include "datalens/numerics/param_vector.hpp"

#include <algorithm>
#include <cmath>

#include "datalens/common/error.hpp"

namespace datalens::numerics {

const Segment& ParamVector::segment(const std::string& name) const {
    for (const auto& s : segments)
        if (s.name == name) return s;
    fail(Error::Kind::config, "unknown parameter segment '" + name + "'");
}

bool ParamVector::has_segment(const std::string& name) const {
    return std::any_of(segments.begin(), segments.end(),
                       [&](const Segment& s) { return s.name == name; });
}

std::span<double> ParamVector::segment_span(const std::string& name) {
    const Segment& s = segment(name);
    return {values.data() + s.offset, s.length};
}

std::span<const double> ParamVector::segment_span(const std::string& name) const {
    const Segment& s = segment(name);
    return {values.data() + s.offset, s.length};
}

void ParamVector::validate() const {
    std::size_t expect = 0;
    for (const auto& s : segments) {
        require(s.offset == expect, Error::Kind::config,
                "parameter segment '" + s.name + "' is not contiguous");
        expect += s.length;
    }
    require(expect == values.size(), Error::Kind::config,
            "parameter segments do not cover the value array");
    for (double v : values)
        require(std::isfinite(v), Error::Kind::numeric,
                "parameter vector contains a non-finite value");
}

ParamVector ParamVector::zeros_like(const ParamVector& other) {
    ParamVector out;
    out.values.assign(other.values.size(), 0.0);
    out.segments = other.segments;
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::span<double> x, double alpha) {
    for (double& v : x) v *= alpha;
}

} // namespace datalens::numerics
