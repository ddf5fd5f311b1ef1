#pragma once

#include <stdexcept>
#include <string>

namespace fraisse {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class VocabularyMismatch : public Error {
public:
    explicit VocabularyMismatch(const std::string& what) : Error(what) {}
};

class UnknownSymbol : public Error {
public:
    explicit UnknownSymbol(const std::string& name) : Error("unknown symbol: " + name) {}
};

class BoundExceeded : public Error {
public:
    explicit BoundExceeded(const std::string& what) : Error(what) {}
};

class NotSubset : public Error {
public:
    explicit NotSubset(const std::string& what) : Error(what) {}
};

class BudgetExhausted : public Error {
public:
    explicit BudgetExhausted(const std::string& what) : Error(what) {}
};

class PreconditionFailed : public Error {
public:
    explicit PreconditionFailed(const std::string& what) : Error(what) {}
};

class DefectiveAge : public Error {
public:
    explicit DefectiveAge(const std::string& what) : Error(what) {}
};

class RangeNotBuilt : public Error {
public:
    explicit RangeNotBuilt(const std::string& what) : Error(what) {}
};

class NotLimit : public Error {
public:
    explicit NotLimit(const std::string& what) : Error(what) {}
};

class HorizonExceeded : public Error {
public:
    explicit HorizonExceeded(const std::string& what) : Error(what) {}
};

}  // namespace fraisse
