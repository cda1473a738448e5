#pragma once

#include <stdexcept>
#include <string>

namespace pathmc {

// Geodesic distance between the two points reaches the cut locus; the
// logarithm (and anything built on it) is not single-valued there.
class CutLocusError : public std::domain_error {
public:
    explicit CutLocusError(const std::string& what) : std::domain_error(what) {}
};

// A driving increment is too long to develop invertibly within one segment.
class DevelopmentRangeError : public std::domain_error {
public:
    explicit DevelopmentRangeError(const std::string& what) : std::domain_error(what) {}
};

// Invalid or inconsistent run configuration (grid step mismatch, missing
// truncation box, quadrature dimension too large, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Requested operation is not available for this manifold backend.
class CapabilityError : public std::runtime_error {
public:
    explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

// A closed-form expectation diverges for the requested parameters.
class DivergenceError : public std::domain_error {
public:
    explicit DivergenceError(const std::string& what) : std::domain_error(what) {}
};

} // namespace pathmc
