#pragma once

#include <stdexcept>
#include <string>

namespace gaitlab {

// Base class for all recoverable toolkit errors. Callers that want to
// distinguish failure modes catch the concrete subclasses below.
class GaitError : public std::runtime_error {
public:
    explicit GaitError(const std::string& msg) : std::runtime_error(msg) {}
};

// A frame contained no foreground pixels where some were required.
class EmptySilhouette : public GaitError {
public:
    explicit EmptySilhouette(const std::string& msg) : GaitError(msg) {}
};

// Fewer than three troughs were found in a lower-limb signal, so no full
// gait cycle could be delimited.
class IncompleteCycle : public GaitError {
public:
    explicit IncompleteCycle(const std::string& msg) : GaitError(msg) {}
};

// A traced region was too small to carry a closed outline (single pixel,
// bare line, or empty).
class DegenerateContour : public GaitError {
public:
    explicit DegenerateContour(const std::string& msg) : GaitError(msg) {}
};

// Input data cannot support the requested fit (e.g. all-constant features).
class DegenerateData : public GaitError {
public:
    explicit DegenerateData(const std::string& msg) : GaitError(msg) {}
};

// Filesystem and serialization failures.
class IoError : public GaitError {
public:
    explicit IoError(const std::string& msg) : GaitError(msg) {}
};

}  // namespace gaitlab
