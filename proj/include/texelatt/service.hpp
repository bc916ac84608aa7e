#pragma once

// HTTP front end for interactive search: session registry with per-session
// exclusive access, transcript persistence, JSON API and static files.

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>

#include <httplib.h>

#include "texelatt/corpus.hpp"

namespace texelatt {

using ServiceClock = std::chrono::steady_clock;

/// Live sessions by opaque id. Sessions idle longer than the TTL are
/// dropped and answer 410 from then on.
class SessionRegistry {
 public:
  enum class Status { ok, unknown, expired, busy };

  struct Entry {
    Entry(SearchSession s, ServiceClock::time_point t) : session(std::move(s)), last_used(t) {}
    SearchSession session;
    std::mutex mu;
    ServiceClock::time_point last_used;
  };

  /// Exclusive access to one session; empty when not granted.
  struct Lease {
    Status status = Status::unknown;
    std::shared_ptr<Entry> entry;
    std::unique_lock<std::mutex> lock;
    explicit operator bool() const { return status == Status::ok; }
  };

  SessionRegistry(std::chrono::seconds ttl, std::function<ServiceClock::time_point()> now = ServiceClock::now)
      : ttl_(ttl), now_(std::move(now)), token_rng_(std::random_device{}()) {}

  std::string add(SearchSession session, std::optional<std::string> id = std::nullopt) {
    std::lock_guard lock(mu_);
    sweep_locked();
    std::string key = id ? *id : fresh_token_locked();
    sessions_[key] = std::make_shared<Entry>(std::move(session), now_());
    return key;
  }

  /// Tries to take the session for mutation or reading without blocking.
  Lease acquire(const std::string& id) {
    Lease lease;
    {
      std::lock_guard lock(mu_);
      sweep_locked();
      const auto it = sessions_.find(id);
      if (it == sessions_.end()) {
        lease.status = expired_.count(id) ? Status::expired : Status::unknown;
        return lease;
      }
      lease.entry = it->second;
    }
    lease.lock = std::unique_lock(lease.entry->mu, std::try_to_lock);
    if (!lease.lock.owns_lock()) {
      lease.status = Status::busy;
      return lease;
    }
    lease.entry->last_used = now_();
    lease.status = Status::ok;
    return lease;
  }

  /// Ids dropped by the most recent sweeps, for callers cleaning up storage.
  std::vector<std::string> take_expired_ids() {
    std::lock_guard lock(mu_);
    sweep_locked();
    std::vector<std::string> out;
    out.swap(newly_expired_);
    return out;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
  }

 private:
  void sweep_locked() {
    const auto now = now_();
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      std::unique_lock busy(it->second->mu, std::try_to_lock);
      if (busy.owns_lock() && now - it->second->last_used > ttl_) {
        expired_.insert(it->first);
        newly_expired_.push_back(it->first);
        busy.unlock();
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::string fresh_token_locked() {
    static const char* hex = "0123456789abcdef";
    for (;;) {
      std::string s;
      for (int i = 0; i < 2; ++i) {
        std::uint64_t v = token_rng_();
        for (int k = 0; k < 16; ++k, v >>= 4) s += hex[v & 15];
      }
      if (!sessions_.count(s) && !expired_.count(s)) return s;
    }
  }

  std::chrono::seconds ttl_;
  std::function<ServiceClock::time_point()> now_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::set<std::string> expired_;
  std::vector<std::string> newly_expired_;
  std::mt19937_64 token_rng_;
};

struct ServiceOptions {
  fs::path state_dir;  // session transcripts; empty: no persistence
  fs::path webui_dir;  // static files; empty: none
  std::chrono::seconds idle_ttl{3600};
  AttributeSource source = AttributeSource::detected;
  PipelineConfig config;
  std::uint64_t seed = 0;  // random targets
  std::function<ServiceClock::time_point()> clock = ServiceClock::now;
};

inline int service_port_from_env() {
  const char* v = std::getenv("TEXELATT_PORT");
  if (!v || !*v) return 8080;
  try {
    const int p = std::stoi(v);
    if (p < 0 || p > 65535) throw std::out_of_range("port");
    return p;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("TEXELATT_PORT is not a port number: ") + v);
  }
}

class SearchService {
 public:
  SearchService(const CorpusStore& store, ServiceOptions options)
      : store_(store),
        options_(std::move(options)),
        corpus_(store_.search_corpus(options_.source, options_.config.gamma_fraction)),
        registry_(options_.idle_ttl, options_.clock),
        target_rng_(options_.seed) {
    if (!options_.state_dir.empty()) {
      fs::create_directories(options_.state_dir);
      restore_sessions();
    }
    routes();
  }

  httplib::Server& server() { return server_; }
  SessionRegistry& registry() { return registry_; }

  /// Binds to host:port (port 0 picks a free port); returns the bound port.
  int bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw DataError("cannot bind " + host + ":" + std::to_string(port));
    return bound;
  }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }

 private:
  static void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& message, Json extra = Json::object()) {
    extra["error"] = message;
    send_json(res, status, extra);
  }

  static Json attribute_list() {
    Json out = Json::array();
    for (const auto& l : descriptor_labels()) out.push_back(l);
    return out;
  }

  // Maps a failed lease to its HTTP status.
  static void send_lease_error(httplib::Response& res, SessionRegistry::Status s) {
    switch (s) {
      case SessionRegistry::Status::unknown: return send_error(res, 404, "unknown session");
      case SessionRegistry::Status::expired: return send_error(res, 410, "session expired");
      case SessionRegistry::Status::busy: return send_error(res, 409, "session busy with another request");
      case SessionRegistry::Status::ok: break;
    }
  }

  Json session_state(const std::string& id, const SearchSession& s) const {
    Json j = session_transcript(s);
    j["session_id"] = id;
    j["attribute_labels"] = attribute_list();
    return j;
  }

  void persist(const std::string& id, const SearchSession& s) {
    if (options_.state_dir.empty()) return;
    atomic_write(options_.state_dir / (id + ".json"), session_transcript(s).dump() + "\n");
  }

  void drop_expired_files() {
    if (options_.state_dir.empty()) return;
    for (const auto& id : registry_.take_expired_ids()) {
      std::error_code ec;
      fs::remove(options_.state_dir / (id + ".json"), ec);
    }
  }

  void restore_sessions() {
    for (const auto& entry : fs::directory_iterator(options_.state_dir)) {
      if (entry.path().extension() != ".json") continue;
      const std::string id = entry.path().stem().string();
      try {
        registry_.add(replay_transcript(corpus_, read_json_file(entry.path().string())), id);
      } catch (const std::exception& e) {
        std::fprintf(stderr, "skipping unreadable session %s: %s\n", id.c_str(), e.what());
      }
    }
  }

  std::string pick_target(const Json& body) {
    const std::string target = body.value("target", std::string("random"));
    if (target != "random") return target;
    std::lock_guard lock(target_mu_);
    return corpus_->id(std::size_t(target_rng_.uniform_int(0, std::int64_t(corpus_->size()) - 1)));
  }

  void routes() {
    server_.Get("/api/attributes", [](const httplib::Request&, httplib::Response& res) {
      Json out = Json::array();
      const auto& labels = descriptor_labels();
      const auto& text = descriptor_descriptions();
      for (std::size_t i = 0; i < kDescriptorSize; ++i)
        out.push_back({{"label", labels[i]}, {"description", text[i]}, {"block", descriptor_block(i)}});
      send_json(res, 200, out);
    });

    server_.Get(R"(/api/image/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!store_.contains(id)) return send_error(res, 404, "unknown image");
      try {
        res.set_content(read_text_file(store_.image_path(id).string()), "image/png");
      } catch (const DataError& e) {
        send_error(res, 404, e.what());
      }
    });

    server_.Post("/api/session", [this](const httplib::Request& req, httplib::Response& res) {
      drop_expired_files();
      Json body = Json::object();
      if (!req.body.empty()) {
        body = Json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) return send_error(res, 400, "body must be a JSON object");
      }
      if (body.contains("target") && !body["target"].is_string())
        return send_error(res, 400, "target must be \"random\" or an image id");
      const std::string target = pick_target(body);
      if (!corpus_->contains(target)) return send_error(res, 404, "unknown image " + target);
      SearchSession session(corpus_, target, options_.config.session_options());
      const std::string id = registry_.add(session);
      persist(id, session);
      send_json(res, 200,
                {{"session_id", id},
                 {"target_id", target},
                 {"reference_ids", session.reference_ids()},
                 {"iteration", session.iteration()},
                 {"max_iterations", session.max_iterations()},
                 {"percentile_rank", session.percentile_rank()},
                 {"attribute_labels", attribute_list()}});
    });

    server_.Get(R"(/api/session/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      drop_expired_files();
      const std::string id = req.matches[1];
      auto lease = registry_.acquire(id);
      if (!lease) return send_lease_error(res, lease.status);
      send_json(res, 200, session_state(id, lease.entry->session));
    });

    server_.Post(R"(/api/session/([^/]+)/feedback)", [this](const httplib::Request& req, httplib::Response& res) {
      drop_expired_files();
      const std::string id = req.matches[1];
      const Json body = Json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("constraints") || !body["constraints"].is_array())
        return send_error(res, 400, "body must be {\"constraints\": [...]}");
      std::vector<FeedbackConstraint> feedback;
      try {
        for (const Json& c : body["constraints"]) feedback.push_back(constraint_from_json(c));
      } catch (const std::exception& e) {
        return send_error(res, 422, e.what(), {{"attributes", attribute_list()}});
      }
      auto lease = registry_.acquire(id);
      if (!lease) return send_lease_error(res, lease.status);
      SearchSession& s = lease.entry->session;
      if (s.exhausted()) return send_error(res, 410, "session exhausted: all iterations used");
      try {
        s.apply_feedback(feedback);
      } catch (const UnknownAttribute& e) {
        return send_error(res, 422, e.what(), {{"attributes", attribute_list()}});
      } catch (const std::invalid_argument& e) {
        return send_error(res, 422, e.what());
      }
      persist(id, s);
      send_json(res, 200,
                {{"reference_ids", s.reference_ids()},
                 {"iteration", s.iteration()},
                 {"found", s.found()},
                 {"percentile_rank", s.percentile_rank()},
                 {"target_rank", s.target_rank()}});
    });

    if (!options_.webui_dir.empty()) {
      if (!server_.set_mount_point("/", options_.webui_dir.string()))
        throw DataError("web UI directory not found: " + options_.webui_dir.string());
    }

    server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      } catch (...) {
        send_error(res, 500, "internal error");
      }
    });
  }

  const CorpusStore& store_;
  ServiceOptions options_;
  std::shared_ptr<const SearchCorpus> corpus_;
  SessionRegistry registry_;
  httplib::Server server_;
  std::mutex target_mu_;
  Rng target_rng_;
};

}  // namespace texelatt
