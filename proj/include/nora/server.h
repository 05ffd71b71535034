#pragma once

#include <cstdint>
#include <memory>

#include "nora/session.h"

namespace nora {

/// WebSocket front end. Every client connection gets its own Connection,
/// driven by a steady-clock timer at config.tick_ms. Frames are the JSON
/// envelopes of WireMessage, one per text frame. Single-threaded: run() owns
/// the calling thread until stop().
class Server {
 public:
  /// Binds 127.0.0.1:`port` (0 picks a free port).
  Server(SessionHost& host, std::uint16_t port);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;
  void run();
  /// Safe to call from another thread.
  void stop();
  /// Stops on SIGINT or SIGTERM.
  void stop_on_signals();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nora
