#pragma once

#include <optional>
#include <string>

#include "pertkit/knowledge/relatedness.hpp"

namespace pertkit::knowledge {

struct LiveSourceConfig {
    std::string base_url;              // e.g. http://localhost:8080
    std::string path = "/interactions";
    std::string species = "9606";
    int timeout_ms = 10000;
};

// Interaction scores from a remote endpoint. One GET per pair:
//   GET {path}?identifiers=<geneA>%0d<geneB>&species=<id>
// The body is tab-separated rows "geneA\tgeneB\tcombined_score" with scores
// on the 0-1000 scale. Network failures raise ProviderUnavailable; callers
// that prefer degrading to zero wrap this in DegradingSource.
class LiveSource final : public RelatednessSource {
public:
    explicit LiveSource(LiveSourceConfig config) : config_(std::move(config)) {}

    std::optional<double> pair_score(const std::string& a, const std::string& b) override;
    Provenance provenance() const override { return Provenance::live_api; }

private:
    LiveSourceConfig config_;
};

// Maps ProviderUnavailable from the inner source to an absent edge.
class DegradingSource final : public RelatednessSource {
public:
    explicit DegradingSource(std::shared_ptr<RelatednessSource> inner)
        : inner_(std::move(inner)) {}

    std::optional<double> pair_score(const std::string& a, const std::string& b) override;
    Provenance provenance() const override { return inner_->provenance(); }

private:
    std::shared_ptr<RelatednessSource> inner_;
};

}  // namespace pertkit::knowledge
