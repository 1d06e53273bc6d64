#pragma once

#include <stdexcept>
#include <string>

namespace bifree {

/// Word length or partition size outside what an operation supports.
class SizeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request needs moments or cumulants beyond a table's degree cap.
class DegreeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Input violates an operation's stated precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A total table lacks an entry it is required to have.
class MissingEntryError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Malformed textual input. `position` is a byte offset when known.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what, std::size_t position = npos)
        : std::runtime_error(position == npos ? what : what + " (at byte " + std::to_string(position) + ")"),
          position_(position) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

}  // namespace bifree
