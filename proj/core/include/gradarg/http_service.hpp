#pragma once

#include "gradarg/error.hpp"
#include "gradarg/session.hpp"

#include <memory>
#include <string>

namespace gradarg {

/// JSON over HTTP front end for a SessionManager.
///
///   GET  /corpora                              bundled corpora
///   GET  /corpora/{name}/sweep?target=&points=  base-score sweep as CSV
///   POST /sessions                              {corpus | af_document, participants}
///   GET  /sessions/{id}
///   POST /sessions/{id}/events                  {actor, event}
///   POST /sessions/{id}/decision                {semantics, strategy, rank}
///   GET  /sessions/{id}/decisions/{k}/explanation?samples=&seed=
///   GET  /sessions/{id}/strengths?semantics=
///   GET  /sessions/{id}/log                     JSON lines
///
/// Errors are {code, message, detail} with a 4xx status.
class HttpService {
public:
  explicit HttpService(SessionManager& sessions);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Blocks until stop(). Returns false if the address cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it (-1 on failure); call listen_after_bind() next.
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status used for an error code.
int http_status(ErrorCode code) noexcept;

}  // namespace gradarg
