#include "eecm/pack_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eecm/errors.hpp"

namespace eecm {

using nlohmann::json;

namespace {

json curve_to_json(const OcpCurve& c) {
    json terms = json::array();
    for (const auto& t : c.tanh_terms)
        terms.push_back({{"amplitude_v", t.amplitude}, {"slope", t.slope}, {"center", t.center}});
    return json{{"exp_amplitude_v", c.exp_amplitude},
                {"exp_rate", c.exp_rate},
                {"linear_slope_v", c.linear_slope},
                {"offset_v", c.offset},
                {"tanh_terms", terms}};
}

OcpCurve curve_from_json(Electrode electrode, const json& j) {
    OcpCurve c;
    c.electrode = electrode;
    c.exp_amplitude = j.value("exp_amplitude_v", 0.0);
    c.exp_rate = j.value("exp_rate", 0.0);
    c.linear_slope = j.value("linear_slope_v", 0.0);
    c.offset = j.at("offset_v").get<double>();
    if (j.contains("tanh_terms")) {
        const auto& terms = j.at("tanh_terms");
        if (terms.size() > c.tanh_terms.size())
            throw ConfigError("ocp curve supports at most 3 tanh terms");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            c.tanh_terms[i] = TanhTerm{terms[i].at("amplitude_v").get<double>(),
                                       terms[i].at("slope").get<double>(),
                                       terms[i].at("center").get<double>()};
        }
    }
    return c;
}

json table_to_json(const HalfCellParamTable& t) {
    return json{{"sol", t.sol},       {"r0_ohm", t.r0_ohm}, {"r1_ohm", t.r1_ohm},
                {"c1_f", t.c1_f},     {"r2_ohm", t.r2_ohm}, {"c2_f", t.c2_f}};
}

HalfCellParamTable table_from_json(Electrode electrode, const json& j) {
    HalfCellParamTable t;
    t.electrode = electrode;
    t.sol = j.at("sol").get<std::vector<double>>();
    t.r0_ohm = j.at("r0_ohm").get<std::vector<double>>();
    t.r1_ohm = j.at("r1_ohm").get<std::vector<double>>();
    t.c1_f = j.at("c1_f").get<std::vector<double>>();
    t.r2_ohm = j.at("r2_ohm").get<std::vector<double>>();
    t.c2_f = j.at("c2_f").get<std::vector<double>>();
    return t;
}

} // namespace

ParameterPack pack_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("parameter pack is not valid JSON: ") + e.what());
    }
    ParameterPack p;
    try {
        p.ocp_neg = curve_from_json(Electrode::negative, j.at("ocp").at("negative"));
        p.ocp_pos = curve_from_json(Electrode::positive, j.at("ocp").at("positive"));
        p.table_neg = table_from_json(Electrode::negative, j.at("tables").at("negative"));
        p.table_pos = table_from_json(Electrode::positive, j.at("tables").at("positive"));
        const auto& e = j.at("esoh");
        p.esoh.qp_ah = e.at("qp_ah").get<double>();
        p.esoh.qn_ah = e.at("qn_ah").get<double>();
        p.esoh.thp0 = e.at("thp0").get<double>();
        p.esoh.thp100 = e.at("thp100").get<double>();
        p.esoh.thn0 = e.at("thn0").get<double>();
        p.esoh.thn100 = e.at("thn100").get<double>();
        p.esoh.eta = e.value("eta", 1.0);
        p.vmin_v = j.at("voltage_limits").at("vmin_v").get<double>();
        p.vmax_v = j.at("voltage_limits").at("vmax_v").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("parameter pack missing field: ") + e.what());
    }
    p.validate();
    return p;
}

ParameterPack load_pack(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open parameter pack: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return pack_from_json_text(ss.str());
}

std::string pack_to_json_text(const ParameterPack& pack) {
    json j;
    j["ocp"]["negative"] = curve_to_json(pack.ocp_neg);
    j["ocp"]["positive"] = curve_to_json(pack.ocp_pos);
    j["tables"]["negative"] = table_to_json(pack.table_neg);
    j["tables"]["positive"] = table_to_json(pack.table_pos);
    j["esoh"] = {{"qp_ah", pack.esoh.qp_ah},   {"qn_ah", pack.esoh.qn_ah},
                 {"thp0", pack.esoh.thp0},     {"thp100", pack.esoh.thp100},
                 {"thn0", pack.esoh.thn0},     {"thn100", pack.esoh.thn100},
                 {"eta", pack.esoh.eta}};
    j["voltage_limits"] = {{"vmin_v", pack.vmin_v}, {"vmax_v", pack.vmax_v}};
    return j.dump(2) + "\n";
}

void save_pack(const ParameterPack& pack, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write parameter pack: " + path);
    out << pack_to_json_text(pack);
}

} // namespace eecm
