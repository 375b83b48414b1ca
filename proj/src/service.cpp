#include "qes/service.hpp"

#include <future>
#include <map>
#include <mutex>

#include "httplib.h"
#include "json.hpp"
#include "qes/crossings.hpp"
#include "qes/export.hpp"
#include "qes/monodromy.hpp"
#include "qes/spectrum.hpp"

namespace qes {

namespace {

using nlohmann::json;

/// Failure mapped to an HTTP status.
struct HttpError {
  int status;
  json body;
};

HttpError http_error(int status, const std::string& message) { return {status, json{{"error", message}}}; }

struct CrossingEntry {
  CrossingSet set;
  std::string json;
  std::vector<Complex> points;
};

int int_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) throw http_error(400, std::string("missing parameter ") + name);
  const std::string v = req.get_param_value(name);
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw http_error(400, std::string("parameter ") + name + " must be an integer");
  return out;
}

double real_param(const httplib::Request& req, const char* name, double fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  try {
    if (v.find(',') == std::string::npos) return parse_complex(v).real();
  } catch (const InvalidArgument&) {
  }
  throw http_error(400, std::string("parameter ") + name + " must be a real number");
}

bool bool_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return false;
  const std::string v = req.get_param_value(name);
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw http_error(400, std::string("parameter ") + name + " must be true or false");
}

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  httplib::Server server;
  std::mutex cache_mutex;
  std::map<int, std::shared_future<std::shared_ptr<const CrossingEntry>>> cache;

  void check_m(int m) const {
    if (m < 1) throw http_error(400, "m must be at least 1");
    if (m > config.max_m) throw http_error(400, "m exceeds the service cap of " + std::to_string(config.max_m));
  }

  /// Computes each m once; concurrent callers share the pending result.
  std::shared_ptr<const CrossingEntry> crossings(int m) {
    std::shared_future<std::shared_ptr<const CrossingEntry>> fut;
    std::promise<std::shared_ptr<const CrossingEntry>> promise;
    bool owner = false;
    {
      std::lock_guard lock(cache_mutex);
      auto it = cache.find(m);
      if (it == cache.end()) {
        fut = promise.get_future().share();
        cache.emplace(m, fut);
        owner = true;
      } else {
        fut = it->second;
      }
    }
    if (owner) {
      try {
        auto entry = std::make_shared<CrossingEntry>();
        entry->set = crossing_set(m);
        entry->json = crossings_json(entry->set);
        for (const auto& c : entry->set.points) entry->points.push_back(c.b);
        promise.set_value(std::move(entry));
      } catch (...) {
        {
          std::lock_guard lock(cache_mutex);
          cache.erase(m);
        }
        promise.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }

  void send_error(httplib::Response& res, const HttpError& e) {
    res.status = e.status;
    res.set_content(e.body.dump(), "application/json");
  }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [this, f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_error(res, e);
      } catch (const InvalidArgument& e) {
        send_error(res, http_error(400, e.what()));
      } catch (const std::exception& e) {
        send_error(res, http_error(500, e.what()));
      }
    };
  }

  void spectrum(const httplib::Request& req, httplib::Response& res) {
    const int m = int_param(req, "m");
    check_m(m);
    const Complex b(real_param(req, "re", 0.0), real_param(req, "im", 0.0));
    const bool scaled = bool_param(req, "scaled");
    const SexticProblem prob(m);
    const Spectrum s = scaled ? scaled_eigenvalues(prob, b) : eigenvalues(prob, b);
    res.set_content(spectrum_json(m, b, scaled, s), "application/json");
  }

  void crossing_set_route(const httplib::Request& req, httplib::Response& res) {
    const int m = int_param(req, "m");
    check_m(m);
    res.set_content(crossings(m)->json, "application/json");
  }

  void track(const httplib::Request& req, httplib::Response& res) {
    const TrackRequest tr = parse_track_request(req.body);
    check_m(tr.m);
    Braid braid;
    try {
      if (tr.options.clearance > 0.0) {
        const auto entry = crossings(tr.m);
        braid = track_path(tr.m, tr.path, tr.options, entry->points);
      } else {
        braid = track_path(tr.m, tr.path, tr.options);
      }
    } catch (const PathTooClose& e) {
      HttpError err = http_error(409, e.what());
      err.body["crossing"] = {e.crossing().real(), e.crossing().imag()};
      throw err;
    } catch (const NumericalFailure& e) {
      throw http_error(422, e.what());
    }
    auto lines = std::make_shared<std::vector<std::string>>(braid_ndjson(braid));
    res.set_chunked_content_provider("application/x-ndjson", [lines, next = std::size_t{0}](
                                                                 std::size_t, httplib::DataSink& sink) mutable {
      if (next < lines->size()) {
        const std::string chunk = (*lines)[next++] + "\n";
        return sink.write(chunk.data(), chunk.size());
      }
      sink.done();
      return true;
    });
  }

  explicit Impl(ServiceConfig cfg) : config(std::move(cfg)) {
    server.set_default_headers({{"Access-Control-Allow-Origin", config.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/api/spectrum", guarded([this](const auto& q, auto& r) { spectrum(q, r); }));
    server.Get("/api/crossings", guarded([this](const auto& q, auto& r) { crossing_set_route(q, r); }));
    server.Post("/api/track", guarded([this](const auto& q, auto& r) { track(q, r); }));
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int Service::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }
void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}
void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace qes
