#include "gridseg/case_json.hpp"

#include "gridseg/error.hpp"

namespace gridseg {

namespace {

BusType bus_type_from(const std::string& s) {
    if (s == "PQ") {
        return BusType::PQ;
    }
    if (s == "PV") {
        return BusType::PV;
    }
    if (s == "slack") {
        return BusType::Slack;
    }
    throw CaseError("unknown bus type '" + s + "'");
}

} // namespace

nlohmann::json to_json(const GridCase& grid) {
    nlohmann::json buses = nlohmann::json::array();
    for (const auto& b : grid.buses()) {
        buses.push_back({{"id", b.id},
                         {"type", to_string(b.type)},
                         {"Pd", b.pd},
                         {"Qd", b.qd},
                         {"Gs", b.gs},
                         {"Bs", b.bs},
                         {"Vm", b.vm},
                         {"Va_rad", b.va},
                         {"baseKV", b.base_kv},
                         {"area", b.area}});
    }
    nlohmann::json branches = nlohmann::json::array();
    for (const auto& br : grid.branches()) {
        branches.push_back({{"index", br.index},
                            {"from", br.from},
                            {"to", br.to},
                            {"r", br.r},
                            {"x", br.x},
                            {"b", br.b},
                            {"tap", br.tap},
                            {"shift_rad", br.shift},
                            {"in_service", br.in_service}});
    }
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : grid.generators()) {
        gens.push_back({{"bus", g.bus}, {"Pg", g.pg}, {"Qg", g.qg}, {"Vg", g.vg}, {"in_service", g.in_service}});
    }
    return {{"name", grid.name()},
            {"baseMVA", grid.base_mva()},
            {"buses", std::move(buses)},
            {"branches", std::move(branches)},
            {"generators", std::move(gens)}};
}

GridCase case_from_json(const nlohmann::json& doc) {
    try {
        std::vector<Bus> buses;
        for (const auto& j : doc.at("buses")) {
            Bus b;
            b.id = j.at("id").get<int>();
            b.type = bus_type_from(j.at("type").get<std::string>());
            b.pd = j.at("Pd").get<double>();
            b.qd = j.at("Qd").get<double>();
            b.gs = j.at("Gs").get<double>();
            b.bs = j.at("Bs").get<double>();
            b.vm = j.at("Vm").get<double>();
            b.va = j.at("Va_rad").get<double>();
            b.base_kv = j.at("baseKV").get<double>();
            b.area = j.at("area").get<int>();
            buses.push_back(b);
        }
        std::vector<Branch> branches;
        for (const auto& j : doc.at("branches")) {
            Branch br;
            br.index = j.at("index").get<std::size_t>();
            br.from = j.at("from").get<int>();
            br.to = j.at("to").get<int>();
            br.r = j.at("r").get<double>();
            br.x = j.at("x").get<double>();
            br.b = j.at("b").get<double>();
            br.tap = j.at("tap").get<double>();
            br.shift = j.at("shift_rad").get<double>();
            br.in_service = j.at("in_service").get<bool>();
            branches.push_back(br);
        }
        std::vector<Generator> gens;
        for (const auto& j : doc.at("generators")) {
            Generator g;
            g.bus = j.at("bus").get<int>();
            g.pg = j.at("Pg").get<double>();
            g.qg = j.at("Qg").get<double>();
            g.vg = j.at("Vg").get<double>();
            g.in_service = j.at("in_service").get<bool>();
            gens.push_back(g);
        }
        return GridCase(doc.at("name").get<std::string>(), doc.at("baseMVA").get<double>(), std::move(buses),
                        std::move(branches), std::move(gens));
    } catch (const nlohmann::json::exception& e) {
        throw CaseError(std::string("malformed case JSON: ") + e.what());
    }
}

} // namespace gridseg
