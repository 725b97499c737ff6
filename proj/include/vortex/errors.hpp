#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

/// Bad or inconsistent input (config fields, file schemas, parameter ranges).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Geometric preconditions violated (non-regular curve, out-of-range parameter).
class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// The local curvature radius is below the minimal representable radius R0,
/// so no coherent amplitude exists at that point.
class SubQuantumRadiusError : public std::runtime_error {
public:
    explicit SubQuantumRadiusError(const std::string& what) : std::runtime_error(what) {}
};

/// A pointwise observable was requested inside a flex interval; callers are
/// expected to route such points through the disconnection machinery instead.
class FlexPointError : public std::runtime_error {
public:
    explicit FlexPointError(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature / series evaluation failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace vortex
