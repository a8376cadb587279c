#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "avmodel/kernel/lts.hpp"

namespace avm::kernel {

class AutParseError : public std::runtime_error {
public:
    AutParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Writes `des (initial, #transitions, #states)` followed by one
/// `(src, "label", dst)` line per transition, sorted by (src, label text, dst).
void export_aut(const Lts& lts, std::ostream& sink);

/// Reads the AUT format back. Canonical labels become structured Actions;
/// any other label is kept verbatim as the gate of an offer-less Action.
Lts import_aut(std::istream& source);

}  // namespace avm::kernel
