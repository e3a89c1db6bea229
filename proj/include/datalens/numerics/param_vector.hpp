#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace datalens::numerics {

struct Segment {
    std::string name;
    std::size_t offset = 0;
    std::size_t length = 0;
};

// Flat 64-bit parameter vector with named, contiguous, non-overlapping
// segments covering [0, size). Segment names identify layers so callers can
// scope derivative computations to part of the network.
struct ParamVector {
    std::vector<double> values;
    std::vector<Segment> segments;

    std::size_t size() const { return values.size(); }

    const Segment& segment(const std::string& name) const;
    bool has_segment(const std::string& name) const;

    std::span<double> segment_span(const std::string& name);
    std::span<const double> segment_span(const std::string& name) const;

    // throws Error::Kind::config on gaps/overlaps, Error::Kind::numeric on
    // non-finite values
    void validate() const;

    static ParamVector zeros_like(const ParamVector& other);
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);

} // namespace datalens::numerics
