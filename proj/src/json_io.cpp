#include "colmatch/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace colmatch {

using nlohmann::json;

namespace {

json edges_to_json(const std::vector<Edge>& edges) {
    json arr = json::array();
    for (const Edge& e : edges) arr.push_back({e.u, e.v});
    return arr;
}

std::vector<Edge> edges_from_json(const json& arr) {
    std::vector<Edge> edges;
    for (const auto& item : arr) {
        if (!item.is_array() || item.size() != 2)
            throw InvalidInputError("edge must be a [u,v] pair");
        edges.emplace_back(item[0].get<int>(), item[1].get<int>());
    }
    return edges;
}

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InvalidInputError("malformed JSON");
    return j;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
    json j;
    j["n2"] = inst.n2;
    json ms = json::array();
    for (const Matching& m : inst.matchings) ms.push_back(edges_to_json(m));
    j["matchings"] = std::move(ms);
    return j.dump();
}

Instance instance_from_json(const std::string& text) {
    json j = parse(text);
    if (!j.contains("n2") || !j.contains("matchings"))
        throw InvalidInputError("instance needs fields n2 and matchings");
    Instance inst;
    inst.n2 = j["n2"].get<int>();
    for (const auto& m : j["matchings"])
        inst.matchings.push_back(edges_from_json(m));
    return inst;
}

std::string solution_to_json(const Solution& sol) {
    json j;
    j["edges"] = edges_to_json(sol.edges);
    j["chosen"] = sol.chosen;
    j["counts"] = sol.counts;
    return j.dump();
}

Solution solution_from_json(const std::string& text) {
    json j = parse(text);
    if (!j.contains("edges") || !j.contains("chosen") || !j.contains("counts"))
        throw InvalidInputError("solution needs fields edges, chosen, counts");
    Solution sol;
    sol.edges = edges_from_json(j["edges"]);
    sol.chosen = j["chosen"].get<std::vector<int>>();
    sol.counts = j["counts"].get<std::vector<long long>>();
    return sol;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write file: " + path);
    out << content;
}

}  // namespace colmatch
