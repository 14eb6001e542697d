#pragma once

#include <stdexcept>
#include <string>

namespace swarmskills {

// Parse and I/O failures. The CLI maps these to exit code 2.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& message)
        : std::runtime_error(message) {}

    ParseError(const std::string& message, const std::string& path, int line = 0)
        : std::runtime_error(format(message, path, line)), path_(path), line_(line) {}

    const std::string& path() const { return path_; }
    int line() const { return line_; }

private:
    static std::string format(const std::string& message, const std::string& path, int line) {
        std::string out = path;
        if (line > 0) out += ":" + std::to_string(line);
        if (!out.empty()) out += ": ";
        return out + message;
    }

    std::string path_;
    int line_ = 0;
};

// Violated operation contracts: refused preconditions, protocol misuse,
// governance aborts. The CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace swarmskills
