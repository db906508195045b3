#pragma once

// Blocking TCP transport for protocol frames. One connection per process,
// serviced by a single loop.

#include <chrono>
#include <cstdint>
#include <string>

#include "wakesteer/protocol.hpp"

namespace wakesteer::transport {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    /// "host:port" or ":port". Throws ConfigError on malformed input.
    static Endpoint parse(const std::string& text);
    std::string to_string() const;
};

class Connection {
public:
    Connection() = default;
    explicit Connection(int fd);
    ~Connection();
    Connection(Connection&& other) noexcept;
    Connection& operator=(Connection&& other) noexcept;
    Connection(const Connection&) = delete;
    Connection& operator=(const Connection&) = delete;

    bool valid() const { return fd_ >= 0; }
    void send_frame(const protocol::Message& msg);
    /// Throws ProtocolError(ConnectionClosed) on orderly shutdown by the peer.
    protocol::Message recv_frame();
    void send_raw(const void* data, std::size_t n);
    void close();

private:
    void recv_exact(void* data, std::size_t n);
    int fd_ = -1;
};

class Listener {
public:
    /// Binds and listens. Port 0 picks a free port; see port().
    explicit Listener(const Endpoint& ep);
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    std::uint16_t port() const { return port_; }
    Connection accept();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Connect, retrying until `timeout` elapses so the peer may start later.
Connection connect(const Endpoint& ep, std::chrono::milliseconds timeout = std::chrono::seconds(10));

/// A port that was free at the time of the call.
std::uint16_t find_free_port();

}  // namespace wakesteer::transport
