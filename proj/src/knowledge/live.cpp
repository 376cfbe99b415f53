#include "pertkit/knowledge/live.hpp"

#include <charconv>
#include <sstream>

#include <httplib.h>

#include "pertkit/common/errors.hpp"

namespace pertkit::knowledge {

namespace {

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xf];
        }
    }
    return out;
}

}  // namespace

std::optional<double> LiveSource::pair_score(const std::string& a, const std::string& b) {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(0, config_.timeout_ms * 1000);

    const std::string target = config_.path + "?identifiers=" + url_encode(a + "\r" + b) +
                               "&species=" + url_encode(config_.species);
    auto res = client.Get(target);
    if (!res) {
        throw ProviderUnavailable("provider unavailable: " + config_.base_url + target + " (" +
                                  httplib::to_string(res.error()) + ")");
    }
    if (res->status < 200 || res->status >= 300) {
        throw ProviderUnavailable("provider unavailable: HTTP " + std::to_string(res->status) +
                                  " from " + config_.base_url + target);
    }

    std::istringstream body(res->body);
    std::string line;
    while (std::getline(body, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const size_t t1 = line.find('\t');
        const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            continue;  // tolerate non-data lines
        }
        const std::string ga = line.substr(0, t1);
        const std::string gb = line.substr(t1 + 1, t2 - t1 - 1);
        if (!((ga == a && gb == b) || (ga == b && gb == a))) {
            continue;
        }
        const std::string score_text = line.substr(t2 + 1);
        double raw = 0.0;
        auto [ptr, ec] = std::from_chars(score_text.data(), score_text.data() + score_text.size(), raw);
        if (ec != std::errc{} || ptr != score_text.data() + score_text.size()) {
            throw ProviderUnavailable("provider returned malformed score row: '" + line + "'");
        }
        if (raw < 0.0 || raw > 1000.0) {
            throw ProviderUnavailable("provider score out of range [0, 1000]: '" + line + "'");
        }
        return raw / 1000.0;
    }
    return std::nullopt;  // no edge reported
}

std::optional<double> DegradingSource::pair_score(const std::string& a, const std::string& b) {
    try {
        return inner_->pair_score(a, b);
    } catch (const ProviderUnavailable&) {
        return std::nullopt;
    }
}

}  // namespace pertkit::knowledge
