#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tracefacts {

/// Base for every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    explicit IoError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what),
          file_(std::move(file)), line_(line) {}
    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Trace links whose endpoints do not resolve to loaded artifacts.
class DanglingReferenceError : public Error {
public:
    explicit DanglingReferenceError(std::vector<std::string> link_ids, std::vector<std::string> missing)
        : Error(format(link_ids, missing)), link_ids_(std::move(link_ids)), missing_(std::move(missing)) {}
    const std::vector<std::string>& link_ids() const noexcept { return link_ids_; }
    const std::vector<std::string>& missing_artifacts() const noexcept { return missing_; }

private:
    static std::string format(const std::vector<std::string>& links, const std::vector<std::string>& missing) {
        std::string msg = "dangling trace links:";
        for (const auto& l : links) msg += " " + l;
        msg += " (unknown artifacts:";
        for (const auto& m : missing) msg += " " + m;
        return msg + ")";
    }
    std::vector<std::string> link_ids_;
    std::vector<std::string> missing_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class ConflictError : public Error {
public:
    using Error::Error;
};

} // namespace tracefacts
