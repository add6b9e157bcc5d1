#include "rfq/rpc/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include <spdlog/spdlog.h>

#include "rfq/rpc/codec.hpp"

namespace rfq::rpc {

namespace {

bool is_socket(int fd) {
  struct stat st {};
  return fstat(fd, &st) == 0 && S_ISSOCK(st.st_mode);
}

}  // namespace

FdStream::FdStream(int in_fd, int out_fd, bool owned)
    : in_(in_fd), out_(out_fd), owned_(owned), socket_(is_socket(in_fd)) {}

FdStream::~FdStream() {
  if (!owned_) return;
  ::close(in_);
  if (out_ != in_) ::close(out_);
}

std::size_t FdStream::read_some(std::uint8_t* buf, std::size_t n) {
  for (;;) {
    ssize_t r = ::read(in_, buf, n);
    if (r >= 0) return static_cast<std::size_t>(r);
    if (errno != EINTR) return 0;
  }
}

bool FdStream::write_all(std::span<const std::uint8_t> bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    ssize_t w = socket_ ? ::send(out_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL)
                        : ::write(out_, bytes.data() + done, bytes.size() - done);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(w);
  }
  return true;
}

void FdStream::shutdown() {
  if (socket_) ::shutdown(in_, SHUT_RDWR);
}

void Session::report(const std::string& why) {
  ++stats_.framing_errors;
  spdlog::warn("rpc: {}", why);
  node_.emit("node", "error", pipeline::error_payload("", "framing", why));
}

SessionStats Session::run() {
  std::atomic<bool> done{false};
  std::atomic<std::uint64_t> sent{0};
  std::thread writer([&] {
    while (!done) {
      auto m = node_.pop_host(std::chrono::milliseconds(20));
      if (!m) continue;
      Bytes frame;
      try {
        frame = encode({Direction::kOut, std::move(*m)});
      } catch (const Error& e) {
        spdlog::warn("rpc: dropping outbound message: {}", e.what());
        continue;
      }
      if (!stream_.write_all(frame)) {
        stream_.shutdown();
        break;
      }
      ++sent;
    }
  });

  FrameDecoder dec;
  std::uint8_t buf[4096];
  for (;;) {
    std::size_t n = stream_.read_some(buf, sizeof buf);
    if (n == 0) break;
    dec.feed(std::span<const std::uint8_t>(buf, n));
    while (auto r = dec.next()) {
      if (!r->ok()) {
        report(r->error);
        continue;
      }
      ++stats_.frames_in;
      try {
        auto e = decode(*r->frame);
        if (e.direction != Direction::kIn) throw Error(ErrorCode::kFraming, "host sent an outbound topic");
        node_.submit_command(std::move(e.message.topic), std::move(e.message.payload));
      } catch (const Error& e) {
        report(e.what());
      }
    }
  }
  if (auto r = dec.finish(); r && !r->ok()) report(r->error);

  // Replies to the last commands may still be on their way.
  auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(1);
  int quiet = 0;
  while (quiet < 3 && std::chrono::steady_clock::now() < deadline) {
    auto before = sent.load();
    std::this_thread::sleep_for(std::chrono::milliseconds(40));
    quiet = sent.load() == before ? quiet + 1 : 0;
  }
  done = true;
  node_.wake_host_readers();
  writer.join();
  stats_.frames_out = sent;
  return stats_;
}

TcpListener::TcpListener(std::uint16_t port, const std::string& host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw Error(ErrorCode::kInvalidArgument, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw Error(ErrorCode::kInvalidArgument, "bad listen address: " + host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 1) < 0) {
    std::string why = std::strerror(errno);
    ::close(fd_);
    throw Error(ErrorCode::kInvalidArgument, "cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  close();
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<FdStream> TcpListener::accept() {
  for (;;) {
    if (closed_) return nullptr;
    int c = ::accept(fd_, nullptr, nullptr);
    if (c >= 0) {
      int one = 1;
      ::setsockopt(c, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<FdStream>(c, c, true);
    }
    if (errno != EINTR) return nullptr;
  }
}

void TcpListener::close() {
  if (closed_.exchange(true)) return;
  ::shutdown(fd_, SHUT_RDWR);
}

std::unique_ptr<FdStream> tcp_connect(const std::string& host, std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  ::inet_pton(AF_INET, host.c_str(), &addr.sin_addr);
  if (fd < 0 || ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    std::string why = std::strerror(errno);
    if (fd >= 0) ::close(fd);
    throw Error(ErrorCode::kInvalidArgument, "cannot connect to " + host + ":" + std::to_string(port) + ": " + why);
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<FdStream>(fd, fd, true);
}

ClockMode clock_mode_from_string(const std::string& s) {
  if (s == "realtime") return ClockMode::kRealtime;
  if (s == "fast") return ClockMode::kFast;
  if (s == "manual") return ClockMode::kManual;
  throw Error(ErrorCode::kInvalidArgument, "clock must be realtime, fast or manual");
}

void NodeRunner::start() {
  if (running_.exchange(true)) return;
  thread_ = std::thread([this] { loop(); });
}

void NodeRunner::stop() {
  if (!running_.exchange(false)) return;
  thread_.join();
}

void NodeRunner::loop() {
  using clock = std::chrono::steady_clock;
  auto wall0 = clock::now();
  Micros virt0 = node_.env().now();
  while (running_) {
    if (mode_ == ClockMode::kManual) {
      node_.process_commands();
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
      continue;
    }
    node_.run_loop_iteration();
    if (mode_ == ClockMode::kRealtime) {
      auto due = wall0 + std::chrono::microseconds(node_.env().now() - virt0);
      if (due > clock::now()) std::this_thread::sleep_until(due);
    }
  }
}

}  // namespace rfq::rpc
