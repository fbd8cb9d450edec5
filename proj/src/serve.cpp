#include "fewlabel/serve.hpp"

#include "fewlabel/http.hpp"
#include <json.hpp>

#include "fewlabel/errors.hpp"

namespace fewlabel {

namespace {

void reply_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", message}}.dump() + "\n", "application/json");
}

} // namespace

void attach_routes(httplib::Server& server, const Predictor& predictor) {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(nlohmann::json{{"status", "ok"}}.dump() + "\n", "application/json");
    });

    server.Post("/predict", [&predictor](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception&) {
            reply_error(res, 400, "request body is not valid JSON");
            return;
        }
        if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
            reply_error(res, 400, "expected {\"text\": \"...\"}");
            return;
        }
        const std::string text = body["text"].get<std::string>();
        if (text.empty()) {
            reply_error(res, 400, "text must not be empty");
            return;
        }
        int k = 3;
        if (body.contains("k")) {
            if (!body["k"].is_number_integer()) {
                reply_error(res, 400, "k must be an integer");
                return;
            }
            k = body["k"].get<int>();
            if (k < 1) {
                reply_error(res, 400, "k must be >= 1");
                return;
            }
        }
        k = std::min(k, predictor.num_classes());

        PredRanking ranking;
        try {
            ranking = predictor.rank("request", text);
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
            return;
        }

        nlohmann::json predictions = nlohmann::json::array();
        for (int i = 0; i < k; ++i) {
            const auto& [label, score] = ranking.ranked[static_cast<std::size_t>(i)];
            predictions.push_back({{"label", label}, {"score", score}});
        }
        res.set_content(nlohmann::json{{"predictions", predictions}}.dump() + "\n",
                        "application/json");
    });
}

void run_server(const Predictor& predictor, const std::string& host, int port) {
    httplib::Server server;
    attach_routes(server, predictor);
    if (!server.bind_to_port(host, port)) {
        throw DataError("serve: cannot bind " + host + ":" + std::to_string(port));
    }
    server.listen_after_bind();
}

} // namespace fewlabel
