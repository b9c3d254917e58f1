#pragma once

#include <stdexcept>
#include <string>

namespace amphough {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct GridTooSmall : Error {
    explicit GridTooSmall(const std::string& w) : Error(w) {}
};
struct NegativeAmplitude : Error {
    explicit NegativeAmplitude(const std::string& w) : Error(w) {}
};
struct EmptyInput : Error {
    explicit EmptyInput(const std::string& w) : Error(w) {}
};
struct TemplateLargerThanImage : Error {
    explicit TemplateLargerThanImage(const std::string& w) : Error(w) {}
};
struct FrameMismatch : Error {
    explicit FrameMismatch(const std::string& w) : Error(w) {}
};
struct FourierResidueTooLarge : Error {
    explicit FourierResidueTooLarge(const std::string& w) : Error(w) {}
};
struct BadLattice : Error {
    explicit BadLattice(const std::string& w) : Error(w) {}
};
struct BadGeometry : Error {
    explicit BadGeometry(const std::string& w) : Error(w) {}
};
struct ScaleNotUnity : Error {
    explicit ScaleNotUnity(const std::string& w) : Error(w) {}
};
struct IncompatibleComponents : Error {
    explicit IncompatibleComponents(const std::string& w) : Error(w) {}
};
struct LatticeMismatch : Error {
    explicit LatticeMismatch(const std::string& w) : Error(w) {}
};
struct EmptyMap : Error {
    explicit EmptyMap(const std::string& w) : Error(w) {}
};
struct BadScene : Error {
    explicit BadScene(const std::string& w) : Error(w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(w) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error(w) {}
};

} // namespace amphough
