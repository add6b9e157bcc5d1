#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <thread>

#include "rfq/pipeline/node.hpp"

namespace rfq::rpc {

/// Reliable ordered byte stream.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  /// Blocks until at least one byte is available; 0 means end of stream.
  virtual std::size_t read_some(std::uint8_t* buf, std::size_t n) = 0;
  /// Returns false once the peer is gone.
  virtual bool write_all(std::span<const std::uint8_t> bytes) = 0;
  /// Unblocks a pending read_some.
  virtual void shutdown() {}
};

class FdStream : public ByteStream {
 public:
  FdStream(int in_fd, int out_fd, bool owned);
  ~FdStream() override;

  std::size_t read_some(std::uint8_t* buf, std::size_t n) override;
  bool write_all(std::span<const std::uint8_t> bytes) override;
  void shutdown() override;

 private:
  int in_;
  int out_;
  bool owned_;
  bool socket_;
};

struct SessionStats {
  std::uint64_t frames_in = 0;
  std::uint64_t frames_out = 0;
  std::uint64_t framing_errors = 0;
};

/// One host connection. Inbound frames become node commands; a writer
/// thread frames everything the node queues for the host.
class Session {
 public:
  Session(pipeline::Node& node, ByteStream& stream) : node_(node), stream_(stream) {}

  /// Returns when the stream ends. The node keeps running.
  SessionStats run();

 private:
  void report(const std::string& why);

  pipeline::Node& node_;
  ByteStream& stream_;
  SessionStats stats_;
};

class TcpListener {
 public:
  /// Port 0 picks an ephemeral port.
  explicit TcpListener(std::uint16_t port, const std::string& host = "127.0.0.1");
  ~TcpListener();

  std::uint16_t port() const { return port_; }
  /// nullptr once close() was called.
  std::unique_ptr<FdStream> accept();
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> closed_{false};
};

std::unique_ptr<FdStream> tcp_connect(const std::string& host, std::uint16_t port);

enum class ClockMode { kRealtime, kFast, kManual };

ClockMode clock_mode_from_string(const std::string& s);

/// Drives the node loop on its own thread.
class NodeRunner {
 public:
  NodeRunner(pipeline::Node& node, ClockMode mode) : node_(node), mode_(mode) {}
  ~NodeRunner() { stop(); }

  void start();
  void stop();

 private:
  void loop();

  pipeline::Node& node_;
  ClockMode mode_;
  std::atomic<bool> running_{false};
  std::thread thread_;
};

}  // namespace rfq::rpc
