#include "detail/http.hpp"

#include "evidex/error.hpp"

namespace evidex::detail {

UrlParts split_url(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos || (url.compare(0, scheme, "http") != 0 && url.compare(0, scheme, "https") != 0)) {
        throw Error(ErrorCode::InvalidArgument, "expected an http:// URL, got '" + url + "'");
    }
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

} // namespace evidex::detail
