#include "dualarm/service.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "dualarm/error.hpp"
#include "dualarm/pipeline.hpp"

#ifndef DUALARM_VERSION
#define DUALARM_VERSION "0.0.0"
#endif

namespace dualarm {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;
using Message = std::shared_ptr<const std::string>;
/// Runs on the executor; the returned continuation (if any) is posted to the
/// io thread after the resulting snapshot is published.
using Job = std::function<std::function<void()>(Pipeline&)>;

constexpr std::size_t kMaxBody = 4u << 20;
constexpr std::size_t kMaxQueuedFrames = 16;

struct Target {
  std::string path;
  std::string query;

  std::optional<std::string> param(std::string_view key) const {
    std::string_view rest = query;
    while (!rest.empty()) {
      const auto amp = rest.find('&');
      const std::string_view item = rest.substr(0, amp);
      const auto eq = item.find('=');
      if (item.substr(0, eq) == key) return std::string(eq == std::string_view::npos ? "" : item.substr(eq + 1));
      if (amp == std::string_view::npos) break;
      rest.remove_prefix(amp + 1);
    }
    return std::nullopt;
  }
};

Target split_target(beast::string_view target) {
  const std::string_view t(target.data(), target.size());
  const auto q = t.find('?');
  if (q == std::string_view::npos) return {std::string(t), {}};
  return {std::string(t.substr(0, q)), std::string(t.substr(q + 1))};
}

http::status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidationError:
    case ErrorCode::kEmptyLexicon:
      return http::status::unprocessable_entity;
    default:
      return http::status::bad_request;
  }
}

Json error_body(ErrorCode code, std::string_view message) {
  return {{"error", {{"code", to_string(code)}, {"message", message}}}};
}

Json parse_body(const std::string& body) {
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("request body: ") + e.what());
  }
}

}  // namespace

struct Service::Impl {
  class HttpSession;
  class StreamSession;
  using Reply = std::function<void(Response)>;

  explicit Impl(SystemConfig cfg) : config(std::move(cfg)), acceptor(ioc), signals(ioc) {}

  SystemConfig config;
  std::optional<Pipeline> pipeline;  // executor thread only, once started

  net::io_context ioc{1};
  std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
  tcp::acceptor acceptor;
  net::signal_set signals;
  std::thread io_thread;
  std::thread exec_thread;
  std::vector<std::weak_ptr<StreamSession>> streams;  // io thread only

  std::mutex jobs_mutex;
  std::condition_variable jobs_cv;
  std::deque<Job> jobs;
  bool stopping = false;
  std::atomic<std::size_t> pending{0};

  std::mutex abort_mutex;
  std::condition_variable abort_cv;
  std::atomic<bool> abort{false};

  std::mutex snapshot_mutex;
  Message snapshot;
  std::vector<Message> history;  // serialized records, append-only
  std::atomic<double> sim_time{0.0};

  std::mutex life_mutex;
  std::condition_variable life_cv;
  bool shutdown_requested = false;
  bool started = false;
  bool stopped = false;

  // --- executor -----------------------------------------------------------

  void publish(const Pipeline& p) {
    auto s = std::make_shared<const std::string>(p.snapshot(config.service.history_tail).dump());
    std::lock_guard lk(snapshot_mutex);
    snapshot = std::move(s);
    sim_time = p.simulator().world().time;
  }

  Message current_snapshot() {
    std::lock_guard lk(snapshot_mutex);
    return snapshot;
  }

  void executor_main() {
    for (;;) {
      Job job;
      {
        std::unique_lock lk(jobs_mutex);
        jobs_cv.wait(lk, [&] { return stopping || !jobs.empty(); });
        if (stopping) return;
        job = std::move(jobs.front());
        jobs.pop_front();
      }
      auto then = job(*pipeline);
      --pending;
      publish(*pipeline);
      if (then) net::post(ioc, std::move(then));
    }
  }

  bool enqueue(Job job) {
    {
      std::lock_guard lk(jobs_mutex);
      if (stopping) return false;
      jobs.push_back(std::move(job));
      ++pending;
    }
    jobs_cv.notify_one();
    return true;
  }

  /// Paces motion against the wall clock and publishes intermediate
  /// snapshots; throws once the service is stopping.
  Simulator::StepObserver motion_observer(Pipeline& p) {
    const auto wall0 = Clock::now();
    const double sim0 = p.simulator().world().time;
    const double scale = config.service.time_scale;
    const auto period = std::chrono::duration<double>(1.0 / config.service.stream_hz);
    auto last = wall0;
    return [this, &p, wall0, sim0, scale, period, last](const WorldState& w) mutable {
      if (abort) throw Error(ErrorCode::kInvalidArgument, "service stopping");
      if (scale > 0.0) {
        const auto due = wall0 + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>((w.time - sim0) / scale));
        std::unique_lock lk(abort_mutex);
        abort_cv.wait_until(lk, due, [&] { return abort.load(); });
        if (abort) throw Error(ErrorCode::kInvalidArgument, "service stopping");
      }
      const auto now = Clock::now();
      if (now - last >= period) {
        last = now;
        publish(p);
      }
    };
  }

  /// `done` runs on the io thread with the serialized record.
  bool submit_command(std::string utterance, Json request, std::function<void(Message)> done) {
    return enqueue([this, utterance = std::move(utterance), request = std::move(request),
                    done = std::move(done)](Pipeline& p) -> std::function<void()> {
      const CommandRecord rec = p.handle_utterance(utterance, motion_observer(p));
      auto body = std::make_shared<const std::string>(to_json(rec).dump());
      {
        std::lock_guard lk(snapshot_mutex);
        history.push_back(body);
      }
      return [this, body, request, done] {
        broadcast_record(body, request);
        if (done) done(body);
      };
    });
  }

  // --- io thread ----------------------------------------------------------

  void broadcast_record(const Message& record, const Json& request);

  void do_accept();

  Response json_response(const Request& req, http::status status, std::string body) {
    Response res{status, req.version()};
    res.set(http::field::server, "dualarm/" DUALARM_VERSION);
    res.set(http::field::content_type, "application/json");
    res.set(http::field::access_control_allow_origin, "*");
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  Response error_response(const Request& req, const Error& e) {
    return json_response(req, status_for(e.code()), error_body(e.code(), e.what()).dump());
  }

  Response unavailable(const Request& req) {
    return json_response(req, http::status::service_unavailable,
                         error_body(ErrorCode::kInvalidArgument, "service stopping").dump());
  }

  void handle(Request req, Reply reply) {
    const Target target = split_target(req.target());
    const auto method = req.method();
    try {
      if (method == http::verb::options) {
        Response res{http::status::no_content, req.version()};
        res.set(http::field::access_control_allow_origin, "*");
        res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
        res.set(http::field::access_control_allow_headers, "Content-Type");
        res.keep_alive(req.keep_alive());
        res.prepare_payload();
        return reply(std::move(res));
      }
      if (target.path == "/health" && method == http::verb::get) {
        const Json body = {{"status", "ok"}, {"version", DUALARM_VERSION}, {"sim_time", sim_time.load()},
                           {"pending", pending.load()}};
        return reply(json_response(req, http::status::ok, body.dump()));
      }
      if (target.path == "/state" && method == http::verb::get) {
        return reply(json_response(req, http::status::ok, *current_snapshot()));
      }
      if (target.path == "/history" && method == http::verb::get) {
        std::size_t limit = config.service.history_tail;
        if (auto v = target.param("limit")) {
          const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), limit);
          if (ec != std::errc() || ptr != v->data() + v->size())
            throw Error(ErrorCode::kParseError, "limit: expected a non-negative integer");
        }
        std::string body = "[";
        {
          std::lock_guard lk(snapshot_mutex);
          const std::size_t n = history.size();
          for (std::size_t i = n > limit ? n - limit : 0; i < n; ++i) {
            if (body.size() > 1) body += ",";
            body += *history[i];
          }
        }
        body += "]";
        return reply(json_response(req, http::status::ok, std::move(body)));
      }
      if (target.path == "/command" && method == http::verb::post) {
        const Json j = parse_body(req.body());
        const auto utterance = required_field<std::string>(j, "utterance", "command");
        if (target.param("wait") == "0") {
          if (!submit_command(utterance, nullptr, {})) return reply(unavailable(req));
          return reply(json_response(req, http::status::accepted, Json{{"queued", true}}.dump()));
        }
        auto shared = std::make_shared<Request>(std::move(req));
        const bool ok = submit_command(utterance, nullptr, [this, shared, reply](Message record) {
          reply(json_response(*shared, http::status::ok, *record));
        });
        if (!ok) reply(unavailable(*shared));
        return;
      }
      if (target.path == "/detections" && method == http::verb::post) {
        auto payload = std::make_shared<Json>(parse_body(req.body()));
        detection_records(*payload);  // shape check before queuing
        auto shared = std::make_shared<Request>(std::move(req));
        const bool ok = enqueue([this, payload, shared, reply](Pipeline& p) -> std::function<void()> {
          Response res;
          try {
            res = json_response(*shared, http::status::ok, to_json(p.ingest_detections(*payload)).dump());
          } catch (const Error& e) {
            res = error_response(*shared, e);
          }
          return [reply, res = std::move(res)]() mutable { reply(std::move(res)); };
        });
        if (!ok) reply(unavailable(*shared));
        return;
      }
      if (target.path == "/lexicon" && method == http::verb::post) {
        auto lexicon = std::make_shared<CommandLexicon>(
            req.body().empty() ? load_lexicon(config.lexicon_path) : lexicon_from_json(parse_body(req.body()), "lexicon"));
        auto shared = std::make_shared<Request>(std::move(req));
        const bool ok = enqueue([this, lexicon, shared, reply](Pipeline& p) -> std::function<void()> {
          p.replace_lexicon(*lexicon);
          const Json body = {{"entries", p.lexicon().entries().size()}, {"vocabulary", p.index().dimension()}};
          Response res = json_response(*shared, http::status::ok, body.dump());
          return [reply, res = std::move(res)]() mutable { reply(std::move(res)); };
        });
        if (!ok) reply(unavailable(*shared));
        return;
      }
      const bool known = target.path == "/health" || target.path == "/state" || target.path == "/history" ||
                         target.path == "/command" || target.path == "/detections" || target.path == "/lexicon";
      const Json body = error_body(ErrorCode::kInvalidArgument, known ? "method not allowed" : "no such route");
      reply(json_response(req, known ? http::status::method_not_allowed : http::status::not_found, body.dump()));
    } catch (const Error& e) {
      reply(error_response(req, e));
    }
  }

  // --- lifecycle ----------------------------------------------------------

  void request_shutdown() {
    {
      std::lock_guard lk(life_mutex);
      shutdown_requested = true;
    }
    life_cv.notify_all();
  }
};

class Service::Impl::StreamSession : public std::enable_shared_from_this<StreamSession> {
 public:
  StreamSession(tcp::socket socket, Impl& impl) : ws_(std::move(socket)), timer_(ws_.get_executor()), impl_(impl) {}

  void run(Request req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  /// Records are never dropped; state frames are skipped for slow readers.
  void send(Message msg, bool droppable = false) {
    if (closed_) return;
    if (droppable && queue_.size() >= kMaxQueuedFrames) return;
    queue_.push_back(std::move(msg));
    if (queue_.size() == 1) write_front();
  }

  static Message make(const Json& j) { return std::make_shared<const std::string>(j.dump()); }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    impl_.streams.push_back(weak_from_this());
    ws_.text(true);
    push_state();
    read();
    tick();
  }

  void push_state() {
    const Message snap = impl_.current_snapshot();
    send(std::make_shared<const std::string>(R"({"type":"state","data":)" + *snap + "}"), true);
  }

  void tick() {
    timer_.expires_after(std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(1.0 / impl_.config.service.stream_hz)));
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      self->push_state();
      self->tick();
    });
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle_message(text);
    read();
  }

  void reply_error(const Json& request, ErrorCode code, std::string_view message) {
    send(make({{"type", "error"}, {"request", request}, {"code", to_string(code)}, {"message", message}}));
  }

  void handle_message(const std::string& text) {
    Json request = nullptr;
    try {
      const Json j = parse_body(text);
      if (!j.is_object()) throw Error(ErrorCode::kParseError, "message: expected an object");
      request = j.value("request", Json(nullptr));
      const auto type = required_field<std::string>(j, "type", "message");
      if (type == "command") {
        const auto utterance = required_field<std::string>(j, "utterance", "message");
        if (!impl_.submit_command(utterance, request, {})) {
          return reply_error(request, ErrorCode::kInvalidArgument, "service stopping");
        }
        send(make({{"type", "ack"}, {"request", request}, {"queued", true}}));
      } else if (type == "detections") {
        auto payload = std::make_shared<Json>(j.contains("detections") ? j.at("detections") : Json::array());
        detection_records(*payload);
        const bool ok = impl_.enqueue([self = shared_from_this(), payload, request](Pipeline& p)
                                          -> std::function<void()> {
          Json out;
          try {
            out = {{"type", "ingest"}, {"request", request}, {"result", to_json(p.ingest_detections(*payload))}};
          } catch (const Error& e) {
            out = {{"type", "error"}, {"request", request}, {"code", to_string(e.code())}, {"message", e.what()}};
          }
          return [self, msg = make(out)] { self->send(msg); };
        });
        if (!ok) reply_error(request, ErrorCode::kInvalidArgument, "service stopping");
      } else if (type == "state") {
        push_state();
      } else {
        throw Error(ErrorCode::kParseError, "message.type: unknown '" + type + "'");
      }
    } catch (const Error& e) {
      reply_error(request, e.code(), e.what());
    }
  }

  void write_front() {
    ws_.async_write(net::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->queue_.clear();
        self->timer_.cancel();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_front();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<Message> queue_;
  bool closed_ = false;
  Impl& impl_;
};

class Service::Impl::HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Impl& impl) : stream_(std::move(socket)), impl_(impl) {}

  void run() {
    net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->read(); });
  }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(kMaxBody);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_both, ignored);
      return;
    }
    Request req = parser_->release();
    if (websocket::is_upgrade(req)) {
      if (split_target(req.target()).path == "/stream") {
        stream_.expires_never();
        std::make_shared<StreamSession>(stream_.release_socket(), impl_)->run(std::move(req));
        return;
      }
      write(impl_.json_response(req, http::status::not_found,
                                error_body(ErrorCode::kInvalidArgument, "no such stream").dump()));
      return;
    }
    stream_.expires_never();
    impl_.handle(std::move(req), [self = shared_from_this()](Response res) { self->write(std::move(res)); });
  }

  void write(Response res) {
    auto sp = std::make_shared<Response>(std::move(res));
    stream_.expires_after(std::chrono::seconds(30));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (sp->need_eof()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  Impl& impl_;
};

void Service::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (!acceptor.is_open()) return;
    if (!ec) std::make_shared<HttpSession>(std::move(socket), *this)->run();
    do_accept();
  });
}

void Service::Impl::broadcast_record(const Message& record, const Json& request) {
  const std::string head = R"({"type":"record","request":)" + request.dump() + R"(,"data":)";
  const auto msg = std::make_shared<const std::string>(head + *record + "}");
  std::erase_if(streams, [&](const std::weak_ptr<StreamSession>& w) {
    auto s = w.lock();
    if (!s) return true;
    s->send(msg);
    return false;
  });
}

Service::Service(SystemConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

unsigned short Service::start(const std::string& address, unsigned short port) {
  Impl& m = *impl_;
  if (m.started) throw Error(ErrorCode::kInvalidArgument, "service already started");
  m.pipeline.emplace(m.config);
  m.publish(*m.pipeline);
  try {
    const tcp::endpoint ep(net::ip::make_address(address), port);
    m.acceptor.open(ep.protocol());
    m.acceptor.set_option(net::socket_base::reuse_address(true));
    m.acceptor.bind(ep);
    m.acceptor.listen(net::socket_base::max_listen_connections);
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::kInvalidArgument, "cannot listen on " + address + ":" + std::to_string(port) + ": " + e.what());
  }
  const unsigned short bound = m.acceptor.local_endpoint().port();
  m.work.emplace(m.ioc.get_executor());
  m.do_accept();
  m.started = true;
  m.exec_thread = std::thread([&m] { m.executor_main(); });
  m.io_thread = std::thread([&m] { m.ioc.run(); });
  return bound;
}

void Service::stop_on_signals() {
  Impl& m = *impl_;
  m.signals.add(SIGINT);
  m.signals.add(SIGTERM);
  m.signals.async_wait([&m](beast::error_code ec, int) {
    if (!ec) m.request_shutdown();
  });
}

void Service::wait() {
  Impl& m = *impl_;
  std::unique_lock lk(m.life_mutex);
  m.life_cv.wait(lk, [&] { return m.shutdown_requested; });
}

void Service::stop() {
  Impl& m = *impl_;
  if (!m.started || m.stopped) {
    m.request_shutdown();
    return;
  }
  m.stopped = true;
  {
    std::lock_guard lk(m.jobs_mutex);
    m.stopping = true;
    m.jobs.clear();
  }
  m.jobs_cv.notify_all();
  {
    std::lock_guard lk(m.abort_mutex);
    m.abort = true;
  }
  m.abort_cv.notify_all();
  if (m.exec_thread.joinable()) m.exec_thread.join();

  m.work.reset();
  m.ioc.stop();
  if (m.io_thread.joinable()) m.io_thread.join();
  beast::error_code ignored;
  m.acceptor.close(ignored);
  m.signals.cancel(ignored);
  m.request_shutdown();
}

}  // namespace dualarm
