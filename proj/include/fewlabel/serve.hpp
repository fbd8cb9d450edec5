#pragma once

#include <string>

#include "fewlabel/predictor.hpp"

namespace httplib {
class Server;
}

namespace fewlabel {

// Registers the two routes on an existing server (exposed separately so tests
// can drive an in-process instance):
//   POST /predict {"text": "...", "k": 3} -> {"predictions":[{"label","score"}]}
//   GET  /healthz                         -> {"status":"ok"}
// Bad JSON, missing/empty text or a non-positive k produce 400 with
// {"error": "..."}. k defaults to 3 and is capped at the class count.
void attach_routes(httplib::Server& server, const Predictor& predictor);

// Blocks serving until the process dies; DataError when the address can't be
// bound.
void run_server(const Predictor& predictor, const std::string& host, int port);

} // namespace fewlabel
