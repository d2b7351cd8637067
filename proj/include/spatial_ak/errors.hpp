#pragma once

#include <stdexcept>
#include <string>

namespace spatial_ak {

// Base of every library error. Catch this in front ends; catch the
// subclasses where the failure mode changes what happens next.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// b0 (or a Perron vector) failed to be strictly positive.
class PositivityViolation : public Error {
public:
    using Error::Error;
};

// A shift collided with a point of the discrete spectrum.
class SpectrumCollision : public Error {
public:
    using Error::Error;
};

// rho <= lambda0 (1 - gamma): the value function is infinite.
class InfeasibleParameters : public Error {
public:
    using Error::Error;
};

// <x, b0> <= 0: the state left the half-space where v is defined.
class HalfSpaceViolation : public Error {
public:
    using Error::Error;
};

class ContourError : public Error {
public:
    using Error::Error;
};

class TailDivergence : public Error {
public:
    using Error::Error;
};

class PerronViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace spatial_ak
