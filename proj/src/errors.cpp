#include "zorich/errors.hpp"

#include <sstream>

namespace zorichlab {

namespace {

std::string overflow_message(Stage stage, double exponent) {
    std::ostringstream os;
    os << "exponent overflow in " << (stage == Stage::first ? "first" : "second")
       << " application of Z: x3 = " << exponent << " exceeds 700";
    return os.str();
}

std::string range_message(const std::string& what, double lo, double hi) {
    std::ostringstream os;
    os << what << " (scanned parameter range [" << lo << ", " << hi << "])";
    return os.str();
}

}  // namespace

OverflowError::OverflowError(Stage stage, double exponent)
    : NumericError(overflow_message(stage, exponent)), stage_(stage), exponent_(exponent) {}

NoIntersectionError::NoIntersectionError(const std::string& what, double range_lo, double range_hi)
    : NumericError(range_message(what, range_lo, range_hi)), lo_(range_lo), hi_(range_hi) {}

}  // namespace zorichlab
