#pragma once

// JSON-over-HTTP facade: spectra, crossing sets and path tracking.

#include <memory>
#include <string>

namespace qes {

struct ServiceConfig {
  /// Largest m accepted by every endpoint.
  int max_m = 25;
  /// Value of Access-Control-Allow-Origin.
  std::string cors_origin = "*";
};

/// Routes:
///   GET  /api/spectrum?m&re&im&scaled  spectrum JSON
///   GET  /api/crossings?m              crossing set JSON (memoized per m)
///   POST /api/track                    newline-delimited braid steps, the
///                                      last line carrying the permutation
/// Errors are {"error": message}: 400 for bad input, 409 when the path is
/// within the clearance of a crossing (with "crossing": [re, im]), 422 when
/// the eigenvalues cannot be matched along the path, 500 on solver failure.
class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves until stop(); false if the address cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds to a free port and returns it (negative on failure); serve with
  /// listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qes
