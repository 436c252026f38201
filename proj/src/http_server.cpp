#include "affect/service.hpp"

#include <httplib.h>

namespace affect {

void run_server(Service& service, const std::string& host, int port) {
    httplib::Server server;
    auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
        HttpRequest request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [key, value] : req.params) request.query.emplace(key, value);
        request.body = req.body;
        const auto response = service.handle(request);
        res.status = response.status;
        res.set_content(response.body, response.content_type);
    };
    server.Get(R"(/.*)", dispatch);
    server.Post(R"(/.*)", dispatch);
    if (!server.bind_to_port(host, port)) {
        throw IoError("cannot listen on " + host + ":" + std::to_string(port));
    }
    server.listen_after_bind();
}

}  // namespace affect
