#pragma once

#include <stdexcept>
#include <string>

namespace pdcvis {

// Numerical failure modes get their own types so callers (and the CLI exit-code
// mapping) can tell "your grid is too coarse" apart from "your model is singular"
// without string matching. Precondition violations on plain inputs throw
// std::invalid_argument directly.

/// Refinement disagreement above tolerance: the integration box or node count
/// is too small for the requested spectral widths.
class NonConvergence : public std::runtime_error {
public:
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

/// A ratio or rate was requested for a model whose normalization vanished
/// (e.g. filters that remove all weight, so J_AB = 0).
class DegenerateModel : public std::runtime_error {
public:
    explicit DegenerateModel(const std::string& what) : std::runtime_error(what) {}
};

/// Detection-time arguments must be integer multiples of tau in {0, 1, 2}.
class InvalidTimeBin : public std::invalid_argument {
public:
    explicit InvalidTimeBin(const std::string& what) : std::invalid_argument(what) {}
};

/// A survivor sum failed to assemble into c0 + c1*cos(alpha+beta); this means
/// the enumeration itself is broken, so it is an internal consistency error.
class NonRealCoefficient : public std::logic_error {
public:
    explicit NonRealCoefficient(const std::string& what) : std::logic_error(what) {}
};

/// A stationary term's kernel did not match any of the known integral patterns.
class UnclassifiedKernel : public std::logic_error {
public:
    explicit UnclassifiedKernel(const std::string& what) : std::logic_error(what) {}
};

/// A direct multi-axis sum was requested above the configured node cap.
class GridTooLarge : public std::runtime_error {
public:
    explicit GridTooLarge(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pdcvis
