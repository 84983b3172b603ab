#ifndef CITEIMPACT_ERRORS_HPP
#define CITEIMPACT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace citeimpact {

struct not_found_error : std::runtime_error {
    explicit not_found_error(const std::string& what) : std::runtime_error(what) {}
};

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// A requested window extends past the corpus horizon; the value would be
// right-censored.
struct horizon_error : std::runtime_error {
    explicit horizon_error(const std::string& what) : std::runtime_error(what) {}
};

struct empty_window_error : std::runtime_error {
    explicit empty_window_error(const std::string& what) : std::runtime_error(what) {}
};

struct undefined_metric_error : std::runtime_error {
    explicit undefined_metric_error(const std::string& what) : std::runtime_error(what) {}
};

struct non_convergence_error : std::runtime_error {
    explicit non_convergence_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace citeimpact

#endif
