#pragma once

#include <string>

namespace evidex::detail {

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string path;    // always starts with '/'
};

/// Splits an http(s) URL into origin and path; throws InvalidArgument.
UrlParts split_url(const std::string& url);

} // namespace evidex::detail
