#pragma once

// Lock-step co-simulation frames.
//
// Wire format: a 4-byte unsigned little-endian payload length followed by
// that many bytes of UTF-8 JSON holding a single object whose "type" is one
// of "measure", "control", "stop" or "error". Unknown fields are ignored.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wakesteer::protocol {

struct TurbineMeasurement {
    double power_w = 0.0;
    double dir_rad = 0.0;
    friend bool operator==(const TurbineMeasurement&, const TurbineMeasurement&) = default;
};

struct MeasurementMsg {
    double t = 0.0;
    double dt = 0.0;
    std::vector<TurbineMeasurement> turbines;
    friend bool operator==(const MeasurementMsg&, const MeasurementMsg&) = default;
};

struct TurbineCommand {
    double yaw_rad = 0.0;
    double thrust_scale = 1.0;
    friend bool operator==(const TurbineCommand&, const TurbineCommand&) = default;
};

struct ControlMsg {
    double t = 0.0;
    std::vector<TurbineCommand> turbines;
    friend bool operator==(const ControlMsg&, const ControlMsg&) = default;
};

struct StopMsg {
    std::string reason;
    friend bool operator==(const StopMsg&, const StopMsg&) = default;
};

struct ErrorMsg {
    std::string message;
    friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using Message = std::variant<MeasurementMsg, ControlMsg, StopMsg, ErrorMsg>;

enum class ErrorKind {
    LengthMismatch,
    InvalidUtf8,
    InvalidJson,
    UnknownType,
    Schema,           // well-formed JSON of a known type with missing or bad fields
    EmptyTurbines,
    ConnectionClosed,
    Io,
};

const char* to_string(ErrorKind k);

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(ErrorKind kind, const std::string& detail);
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

constexpr std::size_t kHeaderSize = 4;
constexpr std::uint32_t kMaxPayload = 64u * 1024u * 1024u;

std::string to_json(const Message& msg);
Message from_json(std::string_view payload);

std::vector<std::uint8_t> encode_frame(const Message& msg);
/// Decode exactly one frame occupying all of `bytes`.
Message decode_frame(std::span<const std::uint8_t> bytes);

std::uint32_t read_length_prefix(std::span<const std::uint8_t, kHeaderSize> header);
bool is_valid_utf8(std::string_view s);

}  // namespace wakesteer::protocol
