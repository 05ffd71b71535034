#include "nora/server.h"

#include <chrono>
#include <deque>
#include <csignal>
#include <optional>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace nora {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class ClientSession : public std::enable_shared_from_this<ClientSession> {
 public:
  ClientSession(tcp::socket socket, SessionHost& host)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        conn_(host),
        tick_(host.config().tick_ms),
        start_(std::chrono::steady_clock::now()) {}

  void start() {
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->start_ = std::chrono::steady_clock::now();
      self->read();
      self->schedule_tick();
    });
  }

 private:
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec,
                                                        std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->on_frame(text);
      if (!self->conn_.closed()) self->read();
    });
  }

  void on_frame(const std::string& text) {
    const std::int64_t now = elapsed_ms();
    WireMessage m;
    try {
      m = WireMessage::parse(text);
    } catch (const ProtocolError& e) {
      send(msg::error(conn_.session_id(), "ProtocolError", e.what()));
      return;
    }
    try {
      for (auto& line : conn_.handle(now, m)) send(std::move(line.message));
    } catch (const std::exception& e) {
      send(msg::error(conn_.session_id(), "InternalError", e.what()));
    }
    if (conn_.closed()) close();
  }

  void schedule_tick() {
    timer_.expires_after(std::chrono::milliseconds(tick_));
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closing_) return;
      try {
        for (auto& line : self->conn_.advance_to(self->elapsed_ms())) {
          self->send(std::move(line.message));
        }
      } catch (const std::exception& e) {
        self->send(msg::error(self->conn_.session_id(), "InternalError", e.what()));
      }
      self->schedule_tick();
    });
  }

  void send(WireMessage m) {
    queue_.push_back(m.serialize());
    if (queue_.size() == 1) write_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->close();
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) {
                        self->write_next();
                      } else if (self->closing_) {
                        self->finish_close();
                      }
                    });
  }

  void close() {
    if (closing_) return;
    closing_ = true;
    conn_.disconnect();
    timer_.cancel();
    if (queue_.empty()) finish_close();
  }

  void finish_close() {
    if (!ws_.is_open()) return;
    ws_.async_close(websocket::close_code::normal,
                    [self = shared_from_this()](beast::error_code) {});
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  Connection conn_;
  std::int64_t tick_;
  std::chrono::steady_clock::time_point start_;
  bool closing_ = false;
};

}  // namespace

struct Server::Impl {
  Impl(SessionHost& h, std::uint16_t port)
      : host(h), acceptor(io, tcp::endpoint(asio::ip::make_address("127.0.0.1"), port)) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<ClientSession>(std::move(socket), host)->start();
      accept();
    });
  }

  SessionHost& host;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::optional<asio::signal_set> signals;
};

Server::Server(SessionHost& host, std::uint16_t port)
    : impl_(std::make_unique<Impl>(host, port)) {
  impl_->accept();
}

Server::~Server() = default;

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() { impl_->io.run(); }

void Server::stop() { impl_->io.stop(); }

void Server::stop_on_signals() {
  impl_->signals.emplace(impl_->io, SIGINT, SIGTERM);
  impl_->signals->async_wait([this](beast::error_code, int) { stop(); });
}

}  // namespace nora
