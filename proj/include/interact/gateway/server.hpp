#pragma once

#include "interact/gateway/gateway.hpp"

#include <memory>
#include <ostream>

namespace interact::gateway {

/// HTTP and WebSocket front end for a Gateway.
///
///   GET  /scenarios              catalog
///   POST /sessions               {"scenario_id", "difficulty"} → 201 {"id"}
///   GET  /sessions/{id}/state    snapshot
///   GET  /sessions/{id}/replay   replay log (JSON Lines)
///   GET  /sessions/{id}/stream   WebSocket upgrade; frames out, commands in
///
/// A session ticks in real time only while its stream is attached; one
/// stream per session. Everything runs on one I/O thread.
class Server {
 public:
  /// Binds at once; port 0 picks a free port. Throws EngineError E_BIND.
  Server(Gateway& gateway, unsigned short port, std::ostream& log);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  /// Blocks until stop().
  void run();
  /// Safe from any thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace interact::gateway
