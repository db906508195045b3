#include "wakesteer/protocol.hpp"

#include <json.hpp>

namespace wakesteer::protocol {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ProtocolError(ErrorKind::Schema, std::string("missing or non-numeric field \"") + key + "\"");
    }
    return j.at(key).get<double>();
}

const json& turbines_array(const json& j) {
    if (!j.contains("turbines") || !j.at("turbines").is_array()) {
        throw ProtocolError(ErrorKind::Schema, "missing \"turbines\" array");
    }
    const auto& arr = j.at("turbines");
    if (arr.empty()) {
        throw ProtocolError(ErrorKind::EmptyTurbines, "empty turbines");
    }
    return arr;
}

}  // namespace

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::LengthMismatch: return "length mismatch";
        case ErrorKind::InvalidUtf8: return "invalid utf-8";
        case ErrorKind::InvalidJson: return "invalid json";
        case ErrorKind::UnknownType: return "unknown type";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::EmptyTurbines: return "empty turbines";
        case ErrorKind::ConnectionClosed: return "connection closed";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

ProtocolError::ProtocolError(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    const std::size_t n = s.size();
    while (i < n) {
        const unsigned c = p[i];
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const unsigned cc = p[i + k];
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong encodings, surrogates and out-of-range code points.
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        i += len;
    }
    return true;
}

std::string to_json(const Message& msg) {
    json j = std::visit(
        overloaded{
            [](const MeasurementMsg& m) {
                json arr = json::array();
                for (const auto& t : m.turbines) arr.push_back({{"power_w", t.power_w}, {"dir_rad", t.dir_rad}});
                return json{{"type", "measure"}, {"t", m.t}, {"dt", m.dt}, {"turbines", arr}};
            },
            [](const ControlMsg& m) {
                json arr = json::array();
                for (const auto& t : m.turbines) arr.push_back({{"yaw_rad", t.yaw_rad}, {"thrust_scale", t.thrust_scale}});
                return json{{"type", "control"}, {"t", m.t}, {"turbines", arr}};
            },
            [](const StopMsg& m) { return json{{"type", "stop"}, {"reason", m.reason}}; },
            [](const ErrorMsg& m) { return json{{"type", "error"}, {"message", m.message}}; },
        },
        msg);
    return j.dump();
}

Message from_json(std::string_view payload) {
    if (!is_valid_utf8(payload)) {
        throw ProtocolError(ErrorKind::InvalidUtf8, "payload is not valid UTF-8");
    }
    json j;
    try {
        j = json::parse(payload);
    } catch (const json::parse_error& e) {
        throw ProtocolError(ErrorKind::InvalidJson, e.what());
    }
    if (!j.is_object()) {
        throw ProtocolError(ErrorKind::InvalidJson, "payload is not a JSON object");
    }
    if (!j.contains("type") || !j.at("type").is_string()) {
        throw ProtocolError(ErrorKind::UnknownType, "missing \"type\"");
    }
    const auto type = j.at("type").get<std::string>();
    if (type == "measure") {
        MeasurementMsg m;
        m.t = number(j, "t");
        m.dt = number(j, "dt");
        for (const auto& t : turbines_array(j)) {
            if (!t.is_object()) throw ProtocolError(ErrorKind::Schema, "turbine entry is not an object");
            m.turbines.push_back({number(t, "power_w"), number(t, "dir_rad")});
        }
        return m;
    }
    if (type == "control") {
        ControlMsg m;
        m.t = number(j, "t");
        for (const auto& t : turbines_array(j)) {
            if (!t.is_object()) throw ProtocolError(ErrorKind::Schema, "turbine entry is not an object");
            m.turbines.push_back({number(t, "yaw_rad"), number(t, "thrust_scale")});
        }
        return m;
    }
    if (type == "stop") {
        StopMsg m;
        if (j.contains("reason") && j.at("reason").is_string()) m.reason = j.at("reason").get<std::string>();
        return m;
    }
    if (type == "error") {
        ErrorMsg m;
        if (j.contains("message") && j.at("message").is_string()) m.message = j.at("message").get<std::string>();
        return m;
    }
    throw ProtocolError(ErrorKind::UnknownType, "unknown message type \"" + type + "\"");
}

std::uint32_t read_length_prefix(std::span<const std::uint8_t, kHeaderSize> h) {
    return static_cast<std::uint32_t>(h[0]) | (static_cast<std::uint32_t>(h[1]) << 8) |
           (static_cast<std::uint32_t>(h[2]) << 16) | (static_cast<std::uint32_t>(h[3]) << 24);
}

std::vector<std::uint8_t> encode_frame(const Message& msg) {
    const auto payload = to_json(msg);
    if (payload.size() > kMaxPayload) {
        throw ProtocolError(ErrorKind::LengthMismatch, "payload exceeds the maximum frame size");
    }
    const auto len = static_cast<std::uint32_t>(payload.size());
    std::vector<std::uint8_t> out(kHeaderSize + payload.size());
    out[0] = static_cast<std::uint8_t>(len & 0xFF);
    out[1] = static_cast<std::uint8_t>((len >> 8) & 0xFF);
    out[2] = static_cast<std::uint8_t>((len >> 16) & 0xFF);
    out[3] = static_cast<std::uint8_t>((len >> 24) & 0xFF);
    std::copy(payload.begin(), payload.end(), out.begin() + kHeaderSize);
    return out;
}

Message decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize) {
        throw ProtocolError(ErrorKind::LengthMismatch, "frame shorter than its length prefix");
    }
    const auto len = read_length_prefix(bytes.first<kHeaderSize>());
    if (len != bytes.size() - kHeaderSize) {
        throw ProtocolError(ErrorKind::LengthMismatch,
                            "prefix says " + std::to_string(len) + " bytes, frame carries " +
                                std::to_string(bytes.size() - kHeaderSize));
    }
    const auto* data = reinterpret_cast<const char*>(bytes.data() + kHeaderSize);
    return from_json(std::string_view(data, len));
}

}  // namespace wakesteer::protocol
