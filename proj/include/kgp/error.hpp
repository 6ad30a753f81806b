#pragma once

#include <stdexcept>
#include <string>

namespace kgp {

// Exception hierarchy. The CLI maps the three families onto exit codes:
// UsageError -> 1, DataError -> 2, NetworkError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public DataError {
public:
    using DataError::DataError;
};

class CorruptFileError : public DataError {
public:
    using DataError::DataError;
};

// Graph file was built against a different corpus or format version.
class ProvenanceError : public DataError {
public:
    using DataError::DataError;
};

class NetworkError : public Error {
public:
    using Error::Error;
};

class TimeoutError : public NetworkError {
public:
    using NetworkError::NetworkError;
};

class AuthError : public NetworkError {
public:
    using NetworkError::NetworkError;
};

class HttpStatusError : public NetworkError {
public:
    HttpStatusError(int status, const std::string& what) : NetworkError(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

class MalformedResponseError : public NetworkError {
public:
    using NetworkError::NetworkError;
};

}  // namespace kgp
