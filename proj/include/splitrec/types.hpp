#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitrec {

using cx = std::complex<double>;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientCoefficients : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct DegenerateSplit : Error {
    using Error::Error;
};
struct SingularBoundarySystem : Error {
    using Error::Error;
};
struct SingularScatterDenominator : Error {
    using Error::Error;
};
struct StarProductSingular : Error {
    using Error::Error;
};
struct PoleHit : Error {
    using Error::Error;
};
struct NoPhysicalRoot : Error {
    using Error::Error;
};
struct EmptySeries : Error {
    using Error::Error;
};

/// A sequence of complex values indexed by an absolute integer node number.
/// Values are stored contiguously starting at first_index().
class GridFunction {
public:
    GridFunction(long first_index, std::vector<cx> values)
        : first_(first_index), values_(std::move(values)) {
        if (values_.empty())
            throw Error("GridFunction: empty value sequence");
    }

    long first_index() const { return first_; }
    long last_index() const { return first_ + static_cast<long>(values_.size()) - 1; }
    std::size_t size() const { return values_.size(); }

    bool covers(long k) const { return k >= first_ && k <= last_index(); }

    const cx& operator[](long k) const {
        if (!covers(k))
            throw IndexOutOfRange("GridFunction: index " + std::to_string(k) +
                                  " outside [" + std::to_string(first_) + ", " +
                                  std::to_string(last_index()) + "]");
        return values_[static_cast<std::size_t>(k - first_)];
    }

    const std::vector<cx>& values() const { return values_; }

private:
    long first_;
    std::vector<cx> values_;
};

}  // namespace splitrec
