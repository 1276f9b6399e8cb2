#pragma once

#include <stdexcept>
#include <string>

namespace ascend {

/* Raised when a computation cannot decide its result at the working
 * precision (e.g. a Gauss-valuation comparison whose outcome depends on
 * digits beyond the tracked ones).  Policy: never return a silently
 * wrong boolean; always surface the precision shortfall. */
class precision_error : public std::runtime_error {
public:
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

/* Raised by square roots (and similar) when the result does not exist in
 * the current valued ring but does exist after adjoining one square root.
 * `relation` is a human-readable description of the minimal quadratic
 * relation to adjoin, e.g. "t^2 = pi" or "t^2 = <unit>".  The throwing
 * site also exposes the element itself through the API that catches this. */
class extension_needed : public std::runtime_error {
public:
    explicit extension_needed(const std::string& relation)
        : std::runtime_error("extension needed: " + relation), relation_(relation) {}
    extension_needed(const std::string& relation, const std::string& what)
        : std::runtime_error(what), relation_(relation) {}
    const std::string& relation() const { return relation_; }
private:
    std::string relation_;
};

} // namespace ascend
