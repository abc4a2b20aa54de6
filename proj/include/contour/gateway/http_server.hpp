#pragma once

#include <memory>
#include <string>

#include "contour/gateway/game_service.hpp"

namespace contour::gateway {

/// HTTP + WebSocket front end for GameService.
///
///   GET  /healthz
///   GET  /images/next                 -> {image_id, image_url}
///   GET  /images/{id}                 -> image bytes
///   POST /session        {image_id}   -> {session_id, width, height}
///   GET  /session/{id}                -> redacted snapshot
///   WS   /session/{id}/stream         stroke_points -> score
///   POST /session/{id}/stroke         same payload as the stream
///   POST /session/{id}/submit         -> {status, score_fraction}
class HttpServer {
public:
    HttpServer(GameService& service, std::string host, unsigned short port);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and starts accepting on a background thread. Port 0 picks a free port.
    void start();
    /// Blocks until stop() is called from another thread.
    void wait();
    void stop();

    unsigned short port() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace contour::gateway
