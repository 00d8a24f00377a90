#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pathloc {

// All failures carry a stable machine-readable code plus a human message.
// Input-shaped errors also carry the 1-based line number when known.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, int line = -1)
        : std::runtime_error(line >= 0 ? code + ": " + message + " (line " + std::to_string(line) + ")"
                                       : code + ": " + message),
          code_(std::move(code)),
          line_(line) {}

    const std::string& code() const { return code_; }
    int line() const { return line_; }

private:
    std::string code_;
    int line_;
};

inline Error schema_error(const std::string& msg, int line = -1) { return Error("SchemaError", msg, line); }
inline Error version_mismatch(const std::string& msg) { return Error("VersionMismatch", msg); }
inline Error empty_file(const std::string& msg) { return Error("EmptyFile", msg); }

}  // namespace pathloc
