#pragma once

// Single include point for the HTTP library so compile-time settings stay
// consistent across translation units. The prediction endpoint must absorb
// bursts of concurrent connections, and the stock 5-slot listen backlog makes
// the kernel silently drop completed handshakes under load, which clients see
// as resets mid-request.
//
// Include this header after any header that pulls in Eigen: the HTTP header
// drags in system headers whose macros break Eigen's templates when they come
// first.
#define CPPHTTPLIB_LISTEN_BACKLOG 128

#include <httplib.h>
