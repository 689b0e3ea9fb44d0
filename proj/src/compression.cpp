#include "listreg/compression.hpp"

#include <cmath>
#include <stdexcept>

namespace listreg {

double generalization_bound(std::int64_t n, std::int64_t size, double delta, double emp_err_full,
                            double emp_err_off_compression, double constant_c) {
    if (n <= 0) throw std::invalid_argument("n must be positive");
    if (delta <= 0 || delta >= 1) throw std::invalid_argument("delta must be in (0,1)");
    if (2 * size > n) throw std::invalid_argument("compression size exceeds n/2");
    if (emp_err_full < 0 || emp_err_off_compression < 0)
        throw std::invalid_argument("negative empirical error");
    double slack = (static_cast<double>(size) * std::log(static_cast<double>(n)) +
                    std::log(1.0 / delta)) /
                   static_cast<double>(n);
    return emp_err_full + constant_c * std::sqrt(emp_err_off_compression * slack) +
           constant_c * slack;
}

Json record_to_json(const CompressionRecord& rec) {
    Json j;
    j["mode"] = rec.mode;
    j["gamma"] = rec.gamma.str();
    j["k"] = rec.k;
    j["radius"] = rec.radius.str();
    j["Q"] = rec.resolution;
    Json subs = Json::array();
    for (const auto& entries : rec.subsequences) {
        Json sub = Json::array();
        for (const auto& e : entries)
            sub.push_back(Json::array({e.x, e.y_num, e.tau_index, e.multiplicity}));
        subs.push_back(std::move(sub));
    }
    j["subsequences"] = std::move(subs);
    j["examples"] = rec.example_count();
    j["side_bits"] = rec.side_bits();
    j["size"] = rec.size();
    return j;
}

CompressionRecord record_from_json(const Json& j) {
    CompressionRecord rec;
    rec.mode = j.at("mode").get<std::string>();
    rec.gamma = Rat::parse(j.at("gamma").get<std::string>());
    rec.k = j.at("k").get<int>();
    rec.radius = Rat::parse(j.at("radius").get<std::string>());
    rec.resolution = j.at("Q").get<std::int64_t>();
    for (const auto& sub : j.at("subsequences")) {
        std::vector<CompressionEntry> entries;
        for (const auto& e : sub) {
            CompressionEntry entry;
            entry.x = e.at(0).get<int>();
            entry.y_num = e.at(1).get<std::int64_t>();
            entry.tau_index = e.at(2).get<int>();
            entry.multiplicity = e.at(3).get<std::int64_t>();
            entries.push_back(entry);
        }
        rec.subsequences.push_back(std::move(entries));
    }
    return rec;
}

}  // namespace listreg
