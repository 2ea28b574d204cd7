#pragma once

// Session transports: newline-delimited JSON over streams, or the same
// messages carried in WebSocket text frames on a local TCP port.
// Needs OpenSSL's libcrypto (SHA-1 and base64 for the handshake).

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "session.hpp"

namespace vsched {

inline void serve_stream(std::istream& in, std::ostream& out) {
  Session session;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out << session.handle_line(line) << '\n';
    out.flush();
  }
}

namespace ws {

inline std::string base64(const unsigned char* data, size_t n) {
  std::string out(4 * ((n + 2) / 3), '\0');
  int len = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data, static_cast<int>(n));
  out.resize(static_cast<size_t>(len));
  return out;
}

inline std::string accept_key(const std::string& client_key) {
  const std::string src = client_key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(src.data(), src.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("SHA-1 digest failed");
  return base64(digest, len);
}

enum Opcode : uint8_t { Continuation = 0x0, Text = 0x1, Binary = 0x2, Close = 0x8, Ping = 0x9, Pong = 0xA };

// Server frames go out unmasked; clients pass a mask.
inline std::string encode_frame(uint8_t opcode, const std::string& payload, const uint8_t* mask = nullptr) {
  std::string f;
  f.push_back(static_cast<char>(0x80 | opcode));
  const uint8_t mbit = mask ? 0x80 : 0x00;
  const uint64_t n = payload.size();
  if (n < 126) {
    f.push_back(static_cast<char>(mbit | n));
  } else if (n <= 0xFFFF) {
    f.push_back(static_cast<char>(mbit | 126));
    f.push_back(static_cast<char>((n >> 8) & 0xFF));
    f.push_back(static_cast<char>(n & 0xFF));
  } else {
    f.push_back(static_cast<char>(mbit | 127));
    for (int s = 56; s >= 0; s -= 8) f.push_back(static_cast<char>((n >> s) & 0xFF));
  }
  if (!mask) return f + payload;
  for (int i = 0; i < 4; ++i) f.push_back(static_cast<char>(mask[i]));
  for (size_t i = 0; i < n; ++i) f.push_back(static_cast<char>(payload[i] ^ mask[i % 4]));
  return f;
}

struct Frame {
  bool fin = true;
  uint8_t opcode = Text;
  bool masked = false;
  std::string payload;
};

inline constexpr uint64_t kMaxPayload = 16u << 20;

// Blocking socket helpers.
class Socket {
 public:
  explicit Socket(int fd = -1) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.fd_), buf_(std::move(o.buf_)) { o.fd_ = -1; }
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = o.fd_;
      buf_ = std::move(o.buf_);
      o.fd_ = -1;
    }
    return *this;
  }
  ~Socket() { close(); }

  int fd() const { return fd_; }
  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

  bool send_all(const std::string& data) {
    size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n <= 0) return false;
      off += static_cast<size_t>(n);
    }
    return true;
  }

  // Fills the buffer until it holds `n` bytes; false on EOF.
  bool fill(size_t n) {
    char tmp[4096];
    while (buf_.size() < n) {
      ssize_t r = ::recv(fd_, tmp, sizeof tmp, 0);
      if (r <= 0) return false;
      buf_.append(tmp, static_cast<size_t>(r));
    }
    return true;
  }
  bool read_exact(size_t n, std::string& out) {
    if (!fill(n)) return false;
    out = buf_.substr(0, n);
    buf_.erase(0, n);
    return true;
  }
  // Reads through the blank line ending an HTTP header block.
  bool read_http_head(std::string& out, size_t max = 65536) {
    char tmp[4096];
    for (;;) {
      auto pos = buf_.find("\r\n\r\n");
      if (pos != std::string::npos) {
        out = buf_.substr(0, pos + 4);
        buf_.erase(0, pos + 4);
        return true;
      }
      if (buf_.size() > max) return false;
      ssize_t r = ::recv(fd_, tmp, sizeof tmp, 0);
      if (r <= 0) return false;
      buf_.append(tmp, static_cast<size_t>(r));
    }
  }

  bool read_frame(Frame& f) {
    std::string h;
    if (!read_exact(2, h)) return false;
    const auto b0 = static_cast<uint8_t>(h[0]), b1 = static_cast<uint8_t>(h[1]);
    f.fin = b0 & 0x80;
    f.opcode = b0 & 0x0F;
    f.masked = b1 & 0x80;
    uint64_t len = b1 & 0x7F;
    if (len == 126) {
      if (!read_exact(2, h)) return false;
      len = (uint64_t{static_cast<uint8_t>(h[0])} << 8) | static_cast<uint8_t>(h[1]);
    } else if (len == 127) {
      if (!read_exact(8, h)) return false;
      len = 0;
      for (char c : h) len = (len << 8) | static_cast<uint8_t>(c);
    }
    if (len > kMaxPayload) return false;
    std::string mask;
    if (f.masked && !read_exact(4, mask)) return false;
    if (!read_exact(static_cast<size_t>(len), f.payload)) return false;
    if (f.masked)
      for (size_t i = 0; i < f.payload.size(); ++i) f.payload[i] = static_cast<char>(f.payload[i] ^ mask[i % 4]);
    return true;
  }

 private:
  int fd_;
  std::string buf_;
};

inline std::string header_value(const std::string& head, const std::string& name) {
  std::string lower_head = head;
  std::transform(lower_head.begin(), lower_head.end(), lower_head.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::string key = "\r\n" + name + ":";
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  auto pos = lower_head.find(key);
  if (pos == std::string::npos) return "";
  pos += key.size();
  auto end = head.find("\r\n", pos);
  std::string v = head.substr(pos, end - pos);
  v.erase(0, v.find_first_not_of(" \t"));
  v.erase(v.find_last_not_of(" \t") + 1);
  return v;
}

inline std::string close_payload(uint16_t code) {
  std::string p;
  p.push_back(static_cast<char>(code >> 8));
  p.push_back(static_cast<char>(code & 0xFF));
  return p;
}

// Serves one WebSocket connection until it closes. Each text message holds
// one or more newline-separated requests; each gets one text frame back.
inline void serve_connection(Socket sock) {
  std::string head;
  if (!sock.read_http_head(head)) return;
  const std::string key = header_value(head, "Sec-WebSocket-Key");
  std::string upgrade = header_value(head, "Upgrade");
  std::transform(upgrade.begin(), upgrade.end(), upgrade.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (head.rfind("GET ", 0) != 0 || key.empty() || upgrade != "websocket") {
    sock.send_all("HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
    return;
  }
  if (!sock.send_all("HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                     "Sec-WebSocket-Accept: " + accept_key(key) + "\r\n\r\n"))
    return;

  Session session;
  std::string message;
  bool in_message = false;
  Frame f;
  while (sock.read_frame(f)) {
    if (!f.masked) {
      sock.send_all(encode_frame(Close, close_payload(1002)));
      return;
    }
    switch (f.opcode) {
      case Ping: sock.send_all(encode_frame(Pong, f.payload)); continue;
      case Pong: continue;
      case Close: sock.send_all(encode_frame(Close, f.payload.substr(0, 2))); return;
      case Binary: sock.send_all(encode_frame(Close, close_payload(1003))); return;
      case Text:
        if (in_message) {
          sock.send_all(encode_frame(Close, close_payload(1002)));
          return;
        }
        message = f.payload;
        in_message = !f.fin;
        break;
      case Continuation:
        if (!in_message) {
          sock.send_all(encode_frame(Close, close_payload(1002)));
          return;
        }
        message += f.payload;
        in_message = !f.fin;
        break;
      default: sock.send_all(encode_frame(Close, close_payload(1002))); return;
    }
    if (in_message) continue;
    size_t start = 0;
    while (start <= message.size()) {
      size_t nl = message.find('\n', start);
      std::string line = message.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        if (!sock.send_all(encode_frame(Text, session.handle_line(line)))) return;
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
  }
}

// Listens on 127.0.0.1. Port 0 picks a free port.
class Server {
 public:
  explicit Server(uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket: " + std::string(std::strerror(errno)));
    listen_ = Socket(fd);
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
      throw std::runtime_error("bind to port " + std::to_string(port) + ": " + std::strerror(errno));
    if (::listen(fd, 16) < 0) throw std::runtime_error("listen: " + std::string(std::strerror(errno)));
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }

  uint16_t port() const { return port_; }

  // Accepts until stop(); each connection gets its own session and thread.
  void serve() {
    std::vector<std::thread> workers;
    while (!stopping_) {
      int c = ::accept(listen_.fd(), nullptr, nullptr);
      if (c < 0) {
        if (stopping_) break;
        continue;
      }
      workers.emplace_back([c] { serve_connection(Socket(c)); });
    }
    for (auto& w : workers) w.join();
  }

  void stop() {
    stopping_ = true;
    ::shutdown(listen_.fd(), SHUT_RDWR);
  }

 private:
  Socket listen_;
  uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
};

// Minimal client, used by tests and scripts.
class Client {
 public:
  Client(uint16_t port, const std::string& key = "dGhlIHNhbXBsZSBub25jZQ==") {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket failed");
    sock_ = Socket(fd);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
      throw std::runtime_error("connect failed");
    sock_.send_all("GET / HTTP/1.1\r\nHost: 127.0.0.1\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                   "Sec-WebSocket-Key: " + key + "\r\nSec-WebSocket-Version: 13\r\n\r\n");
    if (!sock_.read_http_head(response_head_)) throw std::runtime_error("no handshake response");
  }

  const std::string& handshake() const { return response_head_; }

  bool send(uint8_t opcode, const std::string& payload) {
    const uint8_t mask[4] = {0x12, 0x34, 0x56, 0x78};
    return sock_.send_all(encode_frame(opcode, payload, mask));
  }
  bool send_raw(const std::string& bytes) { return sock_.send_all(bytes); }
  bool receive(Frame& f) { return sock_.read_frame(f); }

  std::string request(const std::string& text) {
    if (!send(Text, text)) throw std::runtime_error("send failed");
    Frame f;
    if (!receive(f)) throw std::runtime_error("connection closed");
    return f.payload;
  }

 private:
  Socket sock_;
  std::string response_head_;
};

}  // namespace ws

}  // namespace vsched
