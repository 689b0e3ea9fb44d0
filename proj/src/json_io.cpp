#include "listreg/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace listreg {

Json class_to_json(const HypothesisClass& cls) {
    Json j;
    j["n"] = cls.domain_size;
    j["Q"] = cls.resolution;
    j["kind"] = cls.kind == ClassKind::Total ? "total" : "partial";
    Json rows = Json::array();
    for (const auto& row : cls.rows) {
        Json r = Json::array();
        for (std::int64_t e : row) {
            if (e == kStar)
                r.push_back("*");
            else
                r.push_back(e);
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

HypothesisClass class_from_json(const Json& j) {
    HypothesisClass cls;
    cls.domain_size = j.at("n").get<int>();
    cls.resolution = j.at("Q").get<std::int64_t>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "total")
        cls.kind = ClassKind::Total;
    else if (kind == "partial")
        cls.kind = ClassKind::Partial;
    else
        throw std::invalid_argument("unknown class kind: " + kind);
    for (const auto& row : j.at("rows")) {
        std::vector<std::int64_t> r;
        for (const auto& e : row) {
            if (e.is_string()) {
                if (e.get<std::string>() != "*")
                    throw std::invalid_argument("unexpected string entry");
                r.push_back(kStar);
            } else {
                r.push_back(e.get<std::int64_t>());
            }
        }
        cls.rows.push_back(std::move(r));
    }
    cls.validate();
    return cls;
}

Json distribution_to_json(const FiniteDistribution& dist, std::int64_t resolution) {
    Json j;
    j["Q"] = resolution;
    Json support = Json::array();
    for (const auto& atom : dist.support) {
        if ((atom.y * Rat(resolution)).den != 1)
            throw std::invalid_argument("label not on the declared grid");
        support.push_back(Json::array(
            {atom.x, (atom.y * Rat(resolution)).num, atom.mass.num, atom.mass.den}));
    }
    j["support"] = std::move(support);
    return j;
}

FiniteDistribution distribution_from_json(const Json& j) {
    FiniteDistribution dist;
    std::int64_t q = j.at("Q").get<std::int64_t>();
    for (const auto& row : j.at("support")) {
        FiniteDistribution::Atom atom;
        atom.x = row.at(0).get<int>();
        atom.y = Rat(row.at(1).get<std::int64_t>(), q);
        atom.mass = Rat(row.at(2).get<std::int64_t>(), row.at(3).get<std::int64_t>());
        dist.support.push_back(atom);
    }
    dist.validate();
    return dist;
}

Json sample_to_json(const LabeledSample& sample, std::int64_t resolution) {
    Json j;
    j["Q"] = resolution;
    Json pairs = Json::array();
    for (const auto& [x, y] : sample.pairs) {
        if ((y * Rat(resolution)).den != 1)
            throw std::invalid_argument("label not on the declared grid");
        pairs.push_back(Json::array({x, (y * Rat(resolution)).num}));
    }
    j["pairs"] = std::move(pairs);
    return j;
}

LabeledSample sample_from_json(const Json& j) {
    LabeledSample s;
    std::int64_t q = j.at("Q").get<std::int64_t>();
    for (const auto& row : j.at("pairs"))
        s.pairs.emplace_back(row.at(0).get<int>(), Rat(row.at(1).get<std::int64_t>(), q));
    return s;
}

Json hypothesis_to_json(const std::vector<LabelList>& per_point, int k, const Rat& gamma) {
    Json j;
    j["k"] = k;
    j["gamma"] = gamma.str();
    Json queries = Json::array();
    for (std::size_t x = 0; x < per_point.size(); ++x) {
        Json entry;
        entry["x"] = static_cast<int>(x);
        Json list = Json::array();
        for (const auto& v : per_point[x].values) list.push_back(v.str());
        entry["list"] = std::move(list);
        queries.push_back(std::move(entry));
    }
    j["queries"] = std::move(queries);
    return j;
}

std::vector<LabelList> hypothesis_from_json(const Json& j) {
    std::vector<LabelList> out;
    for (const auto& entry : j.at("queries")) {
        std::vector<Rat> vs;
        for (const auto& v : entry.at("list")) vs.push_back(Rat::parse(v.get<std::string>()));
        int x = entry.at("x").get<int>();
        if (x != static_cast<int>(out.size()))
            throw std::invalid_argument("hypothesis queries must be dense and ordered");
        out.emplace_back(std::move(vs));
    }
    return out;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace listreg
