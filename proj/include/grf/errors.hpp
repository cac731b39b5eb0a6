#ifndef GRF_ERRORS_HPP
#define GRF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace grf {

/// Base class for all numerical/domain errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SingularBlock : public Error {
public:
    using Error::Error;
};
class NotPSD : public Error {
public:
    using Error::Error;
};
class QuadratureFailure : public Error {
public:
    using Error::Error;
};
class NonPSDMoments : public Error {
public:
    using Error::Error;
};
class BaseNotUnitVariance : public Error {
public:
    using Error::Error;
};
class StencilOutOfDomain : public Error {
public:
    using Error::Error;
};
class DegenerateField : public Error {
public:
    using Error::Error;
};
class BoundaryRho : public Error {
public:
    using Error::Error;
};
class NotBoundary : public Error {
public:
    using Error::Error;
};
class ZeroDenominator : public Error {
public:
    using Error::Error;
};
class UnsupportedDimension : public Error {
public:
    using Error::Error;
};
class NotPSDGrid : public Error {
public:
    using Error::Error;
};
class GridTooLarge : public Error {
public:
    using Error::Error;
};
class NoPeaks : public Error {
public:
    using Error::Error;
};
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace grf

#endif
