#include "wakesteer/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <thread>
#include <vector>

#include "wakesteer/error.hpp"

namespace wakesteer::transport {
namespace {

using protocol::ErrorKind;
using protocol::ProtocolError;

[[noreturn]] void io_error(const std::string& what) {
    throw ProtocolError(ErrorKind::Io, what + ": " + std::strerror(errno));
}

sockaddr_in resolve(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    if (ep.host.empty() || ep.host == "localhost") {
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    } else if (inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1) {
        addrinfo hints{};
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        if (getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
            throw ConfigError("cannot resolve host '" + ep.host + "'");
        }
        addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
        freeaddrinfo(res);
    }
    return addr;
}

void set_nodelay(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) {
        throw ConfigError("endpoint must look like host:port, got '" + text + "'");
    }
    Endpoint ep;
    if (colon > 0) ep.host = text.substr(0, colon);
    const auto port_text = text.substr(colon + 1);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || value > 65535) {
        throw ConfigError("invalid port in endpoint '" + text + "'");
    }
    ep.port = static_cast<std::uint16_t>(value);
    return ep;
}

std::string Endpoint::to_string() const {
    return host + ":" + std::to_string(port);
}

Connection::Connection(int fd) : fd_(fd) {}

Connection::~Connection() {
    close();
}

Connection::Connection(Connection&& other) noexcept : fd_(other.fd_) {
    other.fd_ = -1;
}

Connection& Connection::operator=(Connection&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void Connection::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Connection::send_raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    while (n > 0) {
        const auto sent = ::send(fd_, p, n, MSG_NOSIGNAL);
        if (sent < 0) {
            if (errno == EINTR) continue;
            io_error("send");
        }
        p += sent;
        n -= static_cast<std::size_t>(sent);
    }
}

void Connection::recv_exact(void* data, std::size_t n) {
    auto* p = static_cast<char*>(data);
    while (n > 0) {
        const auto got = ::recv(fd_, p, n, 0);
        if (got == 0) {
            throw ProtocolError(ErrorKind::ConnectionClosed, "peer closed the connection");
        }
        if (got < 0) {
            if (errno == EINTR) continue;
            io_error("recv");
        }
        p += got;
        n -= static_cast<std::size_t>(got);
    }
}

void Connection::send_frame(const protocol::Message& msg) {
    const auto bytes = protocol::encode_frame(msg);
    send_raw(bytes.data(), bytes.size());
}

protocol::Message Connection::recv_frame() {
    std::array<std::uint8_t, protocol::kHeaderSize> header{};
    recv_exact(header.data(), header.size());
    const auto len = protocol::read_length_prefix(header);
    if (len > protocol::kMaxPayload) {
        throw ProtocolError(ErrorKind::LengthMismatch, "announced payload exceeds the maximum frame size");
    }
    std::string payload(len, '\0');
    recv_exact(payload.data(), len);
    return protocol::from_json(payload);
}

Listener::Listener(const Endpoint& ep) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) io_error("socket");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    auto addr = resolve(ep);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        const auto msg = "bind " + ep.to_string();
        ::close(fd_);
        io_error(msg);
    }
    if (::listen(fd_, 1) != 0) {
        ::close(fd_);
        io_error("listen");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener() {
    if (fd_ >= 0) ::close(fd_);
}

Connection Listener::accept() {
    for (;;) {
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd >= 0) {
            set_nodelay(fd);
            return Connection(fd);
        }
        if (errno != EINTR) io_error("accept");
    }
}

Connection connect(const Endpoint& ep, std::chrono::milliseconds timeout) {
    const auto addr = resolve(ep);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) io_error("socket");
        if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
            set_nodelay(fd);
            return Connection(fd);
        }
        const int err = errno;
        ::close(fd);
        if (std::chrono::steady_clock::now() >= deadline) {
            errno = err;
            io_error("connect " + ep.to_string());
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

std::uint16_t find_free_port() {
    Listener l(Endpoint{"127.0.0.1", 0});
    return l.port();
}

}  // namespace wakesteer::transport
