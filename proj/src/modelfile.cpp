#include "pca/modelfile.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pca/rng.hpp"

namespace pca {

using nlohmann::json;

std::string subset_key(const Neighborhood& nb, std::uint64_t mask) {
    std::ostringstream out;
    bool first = true;
    for (int i = 0; i < nb.size(); ++i) {
        if (!(mask >> i & 1)) continue;
        if (!first) out << ";";
        first = false;
        const Coord& c = nb.offset(i);
        for (int k = 0; k < nb.dimension(); ++k) {
            if (k) out << ":";
            out << c[k];
        }
    }
    return out.str();
}

std::uint64_t parse_subset_key(const Neighborhood& nb, const std::string& key) {
    if (key.empty()) return 0;
    std::uint64_t mask = 0;
    int last_index = -1;
    std::istringstream in(key);
    std::string part;
    while (std::getline(in, part, ';')) {
        Coord c{0, 0, 0};
        std::istringstream cs(part);
        std::string num;
        int k = 0;
        while (std::getline(cs, num, ':')) {
            if (k >= nb.dimension())
                throw ConfigError("subset key \"" + key + "\": offset \"" + part + "\" has more than " +
                                  std::to_string(nb.dimension()) + " coordinates");
            std::size_t pos = 0;
            int v;
            try {
                v = std::stoi(num, &pos);
            } catch (const std::exception&) {
                throw ConfigError("subset key \"" + key + "\": bad coordinate \"" + num + "\"");
            }
            if (pos != num.size())
                throw ConfigError("subset key \"" + key + "\": bad coordinate \"" + num + "\"");
            c[k++] = v;
        }
        if (k != nb.dimension())
            throw ConfigError("subset key \"" + key + "\": offset \"" + part + "\" has " +
                              std::to_string(k) + " coordinates, expected " +
                              std::to_string(nb.dimension()));
        auto idx = nb.index_of(c);
        if (!idx)
            throw ConfigError("subset key \"" + key + "\": offset \"" + part +
                              "\" is outside the neighborhood");
        if (*idx <= last_index)
            throw ConfigError("subset key \"" + key +
                              "\": offsets must be sorted lexicographically and distinct");
        last_index = *idx;
        mask |= 1ULL << *idx;
    }
    return mask;
}

namespace {

double get_prob(const json& j, const std::string& what) {
    if (!j.is_number())
        throw ConfigError(what + " must be a number");
    const double v = j.get<double>();
    return v;
}

}  // namespace

ModelFile ModelFile::parse(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }
    ModelFile mf;
    try {
        mf.dimension = doc.at("dimension").get<int>();
        mf.radius = doc.at("radius").get<int>();
        const json& spec = doc.at("spec");
        const std::string kind = spec.at("kind").get<std::string>();
        if (kind == "table") {
            mf.kind = Kind::Table;
            for (const auto& [k, v] : spec.at("p").items())
                mf.entries[k] = get_prob(v, "p[\"" + k + "\"]");
        } else if (kind == "lambda") {
            mf.kind = Kind::Lambda;
            for (const auto& [k, v] : spec.at("lambda").items())
                mf.entries[k] = get_prob(v, "lambda[\"" + k + "\"]");
        } else if (kind == "domany-kinzel") {
            mf.kind = Kind::DomanyKinzel;
            mf.a0 = get_prob(spec.at("a0"), "a0");
            mf.a1 = get_prob(spec.at("a1"), "a1");
            mf.a2 = get_prob(spec.at("a2"), "a2");
        } else if (kind == "binomial2d") {
            mf.kind = Kind::Binomial2d;
            mf.alpha = get_prob(spec.at("alpha"), "alpha");
        } else {
            throw ConfigError("unknown model kind \"" + kind + "\"");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }
    if (mf.kind == Kind::DomanyKinzel && (mf.dimension != 1 || mf.radius != 1))
        throw ConfigError("domany-kinzel requires dimension 1 and radius 1");
    if (mf.kind == Kind::Binomial2d && (mf.dimension != 2 || mf.radius != 1))
        throw ConfigError("binomial2d requires dimension 2 and radius 1");
    // validate keys and completeness against the neighborhood now
    const Neighborhood nb = mf.neighborhood();
    if (mf.kind == Kind::Table) {
        if (nb.size() > Neighborhood::kMaxDense)
            throw ConfigError("\"table\" models need (2r+1)^d <= " +
                              std::to_string(Neighborhood::kMaxDense) +
                              "; use a sparse \"lambda\" model instead");
        std::size_t want = 1ULL << nb.size();
        std::size_t seen = 0;
        for (const auto& [k, v] : mf.entries) {
            parse_subset_key(nb, k);
            ++seen;
        }
        if (seen != want)
            throw ConfigError("\"table\" models must enumerate all " + std::to_string(want) +
                              " subsets, got " + std::to_string(seen));
    } else if (mf.kind == Kind::Lambda) {
        for (const auto& [k, v] : mf.entries) parse_subset_key(nb, k);
    }
    return mf;
}

ModelFile ModelFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ModelFile::serialize() const {
    json spec;
    switch (kind) {
        case Kind::Table: {
            spec["kind"] = "table";
            json p = json::object();
            for (const auto& [k, v] : entries) p[k] = v;
            spec["p"] = p;
            break;
        }
        case Kind::Lambda: {
            spec["kind"] = "lambda";
            json l = json::object();
            for (const auto& [k, v] : entries) l[k] = v;
            spec["lambda"] = l;
            break;
        }
        case Kind::DomanyKinzel:
            spec["kind"] = "domany-kinzel";
            spec["a0"] = a0;
            spec["a1"] = a1;
            spec["a2"] = a2;
            break;
        case Kind::Binomial2d:
            spec["kind"] = "binomial2d";
            spec["alpha"] = alpha;
            break;
    }
    json doc;
    doc["dimension"] = dimension;
    doc["radius"] = radius;
    doc["spec"] = spec;
    return doc.dump();
}

Neighborhood ModelFile::neighborhood() const { return Neighborhood::build(radius, dimension); }

bool ModelFile::dense_capable() const {
    return neighborhood().size() <= Neighborhood::kMaxDense;
}

TransitionTable ModelFile::to_table() const {
    switch (kind) {
        case Kind::DomanyKinzel:
            return domany_kinzel(a0, a1, a2);
        case Kind::Binomial2d:
            return binomial2d(alpha);
        case Kind::Table: {
            const Neighborhood nb = neighborhood();
            TransitionTable t{nb, std::vector<double>(1ULL << nb.size(), 0.0)};
            for (const auto& [k, v] : entries) t.p[parse_subset_key(nb, k)] = v;
            t.validate();
            return t;
        }
        case Kind::Lambda:
            return table_from_lambda(to_lambda());
    }
    throw ConfigError("unreachable model kind");
}

LambdaTable ModelFile::to_lambda() const {
    if (kind == Kind::Lambda) {
        const Neighborhood nb = neighborhood();
        LambdaTable lt{nb, {}};
        for (const auto& [k, v] : entries)
            if (v != 0.0) lt.lambda.emplace(parse_subset_key(nb, k), v);
        return lt;
    }
    return mobius_lambda(to_table());
}

std::string ModelFile::digest() const {
    const std::string canon = serialize();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) h = (h ^ c) * 0x100000001b3ULL;
    h = mix64(h);
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace pca
