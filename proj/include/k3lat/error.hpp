#pragma once

#include <stdexcept>
#include <string>

namespace k3lat {

// Precondition violation: the caller handed us input outside the documented
// domain (imprimitive vector, isotropic reflection axis, rank mismatch, ...).
// The CLI maps this to exit code 3.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// Postcondition or internal invariant failure: the library caught itself
// producing something wrong (e.g. a decomposition that does not recompose).
// The CLI maps this to exit code 4.  Seeing one of these is always a bug.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw domain_error(what);
}

inline void ensure(bool cond, const std::string& what) {
    if (!cond) throw internal_error(what);
}

} // namespace k3lat
