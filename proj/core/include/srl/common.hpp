#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace srl {

// Base error for every module; CLI turns these into one-line diagnostics.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input-format errors carry the offending 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line)
        : Error(line > 0 ? ("line " + std::to_string(line) + ": " + msg) : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

namespace detail {
inline void append_parts(std::ostringstream&) {}
template <typename T, typename... Rest>
void append_parts(std::ostringstream& os, const T& v, const Rest&... rest) {
    os << v;
    append_parts(os, rest...);
}
}  // namespace detail

template <typename... Parts>
std::string strcat_msg(const Parts&... parts) {
    std::ostringstream os;
    detail::append_parts(os, parts...);
    return os.str();
}

template <typename... Parts>
void require(bool cond, const Parts&... parts) {
    if (!cond) fail(strcat_msg(parts...));
}

}  // namespace srl
