#include "contour/gateway/http_server.hpp"

#include <sys/socket.h>

#include <condition_variable>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace contour::gateway {

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

std::vector<std::string> split_path(std::string_view target) {
    if (auto q = target.find('?'); q != std::string_view::npos) {
        target = target.substr(0, q);
    }
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= target.size()) {
        const std::size_t slash = target.find('/', start);
        const std::size_t end = slash == std::string_view::npos ? target.size() : slash;
        if (end > start) {
            parts.emplace_back(target.substr(start, end - start));
        }
        if (slash == std::string_view::npos) {
            break;
        }
        start = slash + 1;
    }
    return parts;
}

Response make_response(const Request& req, http::status status, std::string body, std::string_view type) {
    Response res{status, req.version()};
    res.set(http::field::server, "contourbench");
    res.set(http::field::content_type, std::string(type));
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
}

Response json_response(const Request& req, http::status status, const nlohmann::json& body) {
    return make_response(req, status, body.dump(), "application/json");
}

Response error_response(const Request& req, int status, const std::string& message) {
    return json_response(req, static_cast<http::status>(status), {{"error", message}});
}

nlohmann::json parse_body(const Request& req) {
    if (req.body().empty()) {
        return nlohmann::json::object();
    }
    try {
        return nlohmann::json::parse(req.body());
    } catch (const nlohmann::json::parse_error& e) {
        throw ServiceError(400, std::string("request body is not valid JSON: ") + e.what());
    }
}

std::optional<std::string> stream_session(const Request& req) {
    const auto parts = split_path(std::string_view(req.target().data(), req.target().size()));
    if (parts.size() == 3 && parts[0] == "session" && parts[2] == "stream") {
        return parts[1];
    }
    return std::nullopt;
}

}  // namespace

struct HttpServer::Impl {
    GameService& service;
    std::string host;
    unsigned short requested_port;
    unsigned short bound_port = 0;

    net::io_context ioc;
    tcp::acceptor acceptor{ioc};
    std::thread io_thread;

    std::mutex mutex;
    std::condition_variable cv;
    bool running = false;
    bool stopped = false;
    std::size_t active = 0;
    std::set<int> open_fds;

    Impl(GameService& s, std::string h, unsigned short p) : service(s), host(std::move(h)), requested_port(p) {}

    Response route(const Request& req) {
        const auto parts = split_path(std::string_view(req.target().data(), req.target().size()));
        const auto method = req.method();
        try {
            if (method == http::verb::get && parts.size() == 1 && parts[0] == "healthz") {
                return json_response(req, http::status::ok, service.health());
            }
            if (method == http::verb::get && parts.size() == 2 && parts[0] == "images" && parts[1] == "next") {
                return json_response(req, http::status::ok, service.next_image());
            }
            if (method == http::verb::get && parts.size() == 2 && parts[0] == "images") {
                auto path = service.image_file(parts[1]);
                if (!path) {
                    return error_response(req, 404, "no image for '" + parts[1] + "'");
                }
                std::ifstream in(*path, std::ios::binary);
                std::ostringstream bytes;
                bytes << in.rdbuf();
                const bool png = path->extension() == ".png";
                return make_response(req, http::status::ok, bytes.str(), png ? "image/png" : "image/jpeg");
            }
            if (method == http::verb::post && parts.size() == 1 && parts[0] == "session") {
                return json_response(req, http::status::ok, service.open_session(parse_body(req)));
            }
            if (method == http::verb::get && parts.size() == 2 && parts[0] == "session") {
                return json_response(req, http::status::ok, service.session_snapshot(parts[1]));
            }
            if (method == http::verb::post && parts.size() == 3 && parts[0] == "session" && parts[2] == "stroke") {
                return json_response(req, http::status::ok, service.stroke(parts[1], parse_body(req)));
            }
            if (method == http::verb::post && parts.size() == 3 && parts[0] == "session" && parts[2] == "submit") {
                return json_response(req, http::status::ok, service.submit(parts[1]));
            }
            return error_response(req, 404, "no route for " + std::string(req.method_string()) + " " +
                                                std::string(req.target()));
        } catch (const ServiceError& e) {
            return error_response(req, e.status(), e.what());
        } catch (const std::exception& e) {
            return error_response(req, 500, e.what());
        }
    }

    void run_stream(websocket::stream<tcp::socket>& ws, const std::string& session_id) {
        beast::flat_buffer buffer;
        for (;;) {
            beast::error_code ec;
            buffer.clear();
            ws.read(buffer, ec);
            if (ec) {
                return;
            }
            nlohmann::json reply;
            try {
                reply = service.stroke(session_id, nlohmann::json::parse(beast::buffers_to_string(buffer.data())));
            } catch (const ServiceError& e) {
                reply = {{"type", "error"}, {"status", e.status()}, {"message", e.what()}};
            } catch (const std::exception& e) {
                reply = {{"type", "error"}, {"status", 400}, {"message", e.what()}};
            }
            ws.text(true);
            ws.write(net::buffer(reply.dump()), ec);
            if (ec) {
                return;
            }
        }
    }

    void serve_connection(tcp::socket socket) {
        beast::flat_buffer buffer;
        beast::error_code ec;
        for (;;) {
            Request req;
            http::read(socket, buffer, req, ec);
            if (ec) {
                break;
            }
            if (websocket::is_upgrade(req)) {
                auto id = stream_session(req);
                if (!id) {
                    http::write(socket, error_response(req, 404, "websocket endpoint is /session/{id}/stream"), ec);
                    break;
                }
                websocket::stream<tcp::socket> ws(std::move(socket));
                ws.accept(req, ec);
                if (!ec) {
                    run_stream(ws, *id);
                }
                return;
            }
            auto res = route(req);
            http::write(socket, res, ec);
            if (ec || !res.keep_alive()) {
                break;
            }
        }
        socket.shutdown(tcp::socket::shutdown_send, ec);
    }

    void spawn(tcp::socket socket) {
        std::lock_guard lock(mutex);
        if (stopped) {
            return;
        }
        const int fd = socket.native_handle();
        open_fds.insert(fd);
        ++active;
        std::thread([this, fd, s = std::move(socket)]() mutable {
            serve_connection(std::move(s));
            std::lock_guard done(mutex);
            open_fds.erase(fd);
            --active;
            cv.notify_all();
        }).detach();
    }

    void accept_next() {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                return;
            }
            spawn(std::move(socket));
            accept_next();
        });
    }
};

HttpServer::HttpServer(GameService& service, std::string host, unsigned short port)
    : impl_(std::make_unique<Impl>(service, std::move(host), port)) {}

HttpServer::~HttpServer() { stop(); }

void HttpServer::start() {
    auto& s = *impl_;
    const tcp::endpoint endpoint{net::ip::make_address(s.host), s.requested_port};
    try {
        s.acceptor.open(endpoint.protocol());
        s.acceptor.set_option(net::socket_base::reuse_address(true));
        s.acceptor.bind(endpoint);
        s.acceptor.listen(net::socket_base::max_listen_connections);
    } catch (const beast::system_error& e) {
        throw Error("cannot listen on " + s.host + ":" + std::to_string(s.requested_port) + ": " + e.what());
    }
    s.bound_port = s.acceptor.local_endpoint().port();
    s.accept_next();
    {
        std::lock_guard lock(s.mutex);
        s.running = true;
    }
    s.io_thread = std::thread([&s] { s.ioc.run(); });
}

void HttpServer::wait() {
    std::unique_lock lock(impl_->mutex);
    impl_->cv.wait(lock, [this] { return impl_->stopped; });
}

void HttpServer::stop() {
    auto& s = *impl_;
    {
        std::lock_guard lock(s.mutex);
        if (!s.running || s.stopped) {
            return;
        }
        s.stopped = true;
    }
    net::post(s.ioc, [&s] {
        beast::error_code ec;
        s.acceptor.close(ec);
    });
    if (s.io_thread.joinable()) {
        s.io_thread.join();
    }
    std::unique_lock lock(s.mutex);
    for (int fd : s.open_fds) {
        ::shutdown(fd, SHUT_RDWR);
    }
    s.cv.wait(lock, [&s] { return s.active == 0; });
    s.cv.notify_all();
}

unsigned short HttpServer::port() const noexcept { return impl_->bound_port; }

}  // namespace contour::gateway
