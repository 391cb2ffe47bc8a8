#pragma once

#include <memory>
#include <string>

#include "dualarm/config.hpp"

namespace dualarm {

/// HTTP + WebSocket front end for a Pipeline.
///
/// A single executor thread owns the pipeline and runs jobs in arrival
/// order; network handlers only parse, validate and enqueue. Readers see
/// immutable snapshots published by the executor after every job and,
/// during motion, at the stream rate.
///
/// Routes:
///   GET  /health              {"status":"ok","sim_time":s,"pending":n}
///   GET  /state               full snapshot (arms, objects, detections, history tail)
///   GET  /history?limit=N     most recent N command records
///   POST /command             {"utterance": "..."} -> CommandRecord; `?wait=0` -> 202
///   POST /detections          [records] or {"detections": [...]} -> ingest result
///   POST /lexicon             lexicon document; empty body reloads the configured file
///   GET  /stream              WebSocket; see docs/service.md
class Service {
 public:
  explicit Service(SystemConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts serving; port 0 picks a free port. Returns the bound
  /// port. Throws InvalidArgument when the address cannot be bound.
  unsigned short start(const std::string& address, unsigned short port);

  /// SIGINT/SIGTERM make wait() return.
  void stop_on_signals();

  /// Blocks until stop() is called or a registered signal arrives.
  void wait();

  /// Aborts the running command, drops queued ones, closes all connections.
  /// Idempotent.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dualarm
