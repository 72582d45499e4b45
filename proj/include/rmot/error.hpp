#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmot {

/// Failure with a machine-readable code and optional file/line context.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string file = {}, std::size_t line = 0);

    const std::string& code() const noexcept { return code_; }
    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string code_;
    std::string file_;
    std::size_t line_;
};

}  // namespace rmot
