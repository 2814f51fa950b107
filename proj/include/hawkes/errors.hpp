#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

// Exit-code categories used by the CLI: domain errors map to 1, I/O errors to 2.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Lambda * max-row-sum(A_N) >= 1: the subcritical operator gate rejected the input.
class subcritical_gate_error : public domain_error {
public:
    explicit subcritical_gate_error(const std::string& msg) : domain_error(msg) {}
};

// Power iteration failed to certify a simple positive dominant eigenpair.
class degenerate_graph_error : public domain_error {
public:
    explicit degenerate_graph_error(const std::string& msg) : domain_error(msg) {}
};

// Observation horizon too short for the requested statistic.
class horizon_error : public domain_error {
public:
    explicit horizon_error(const std::string& msg) : domain_error(msg) {}
};

// t/Delta or 2t/Delta is not an integer.
class grid_error : public domain_error {
public:
    explicit grid_error(const std::string& msg) : domain_error(msg) {}
};

}  // namespace hawkes
