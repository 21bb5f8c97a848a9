#include "ftrack/initial_data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ftrack {

namespace {

double ksum(const std::vector<double>& len, const std::vector<double>& a,
            const std::vector<double>* b = nullptr) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < len.size(); ++i) {
        const double term = len[i] * a[i] * (b ? (*b)[i] : 1.0);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace

double InitialData::total_mass() const { return ksum(len, rho); }

double InitialData::total_momentum() const { return ksum(len, rho, &v); }

LagrangianData InitialData::lagrangian() const {
    LagrangianData d;
    d.states.reserve(rho.size());
    d.widths.reserve(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        d.states.push_back(LagState{1.0 / rho[i], v[i]});
        d.widths.push_back(rho[i] * len[i]);
    }
    return d;
}

void InitialData::validate() const {
    if (rho.empty() || rho.size() != len.size() || rho.size() != v.size()) {
        throw EmptySupport("initial data: no cells");
    }
    if (!(b0 > a0)) throw EmptySupport("initial data: b0 must exceed a0");
    double total = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(len[i] > 0.0)) throw SchemaError("initial data: cell lengths must be positive");
        if (!(rho[i] > 0.0) || !std::isfinite(rho[i])) {
            throw NonPositiveDensity("initial data: rho must be uniformly positive");
        }
        if (!std::isfinite(v[i])) throw SchemaError("initial data: v must be finite");
        total += len[i];
    }
    if (std::fabs(total - (b0 - a0)) > 1e-9 * std::max(1.0, b0 - a0)) {
        throw SchemaError("initial data: cell lengths do not cover [a0, b0]");
    }
}

InitialData parse_initial_data(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("initial data: invalid JSON: ") + e.what());
    }
    InitialData d;
    try {
        d.a0 = j.at("a0").get<double>();
        d.b0 = j.at("b0").get<double>();
        for (const auto& cell : j.at("cells")) {
            d.len.push_back(cell.at("len").get<double>());
            d.rho.push_back(cell.at("rho").get<double>());
            d.v.push_back(cell.at("v").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("initial data: missing or mistyped field: ") + e.what());
    }
    d.validate();
    return d;
}

InitialData load_initial_data(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("initial data: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_initial_data(buf.str());
}

InitialData normalize(InitialData data) {
    data.validate();
    const double shift = data.total_momentum() / data.total_mass();
    for (auto& vi : data.v) vi -= shift;
    data.v_bar += shift;
    return data;
}

InitialData builtin_data(const std::string& name) {
    InitialData d;
    if (name == "constant") {
        d.a0 = 0.0;
        d.b0 = 0.5;
        d.len = {0.5};
        d.rho = {2.0};
        d.v = {0.0};
    } else if (name == "two-shock") {
        // Lagrangian jump (1,0) | (1, -4 sinh(1/2)): two shocks of size -1/2.
        d.a0 = 0.0;
        d.b0 = 1.0;
        d.len = {0.5, 0.5};
        d.rho = {1.0, 1.0};
        d.v = {0.0, -4.0 * std::sinh(0.5)};
    } else if (name == "shock-rarefaction") {
        // (1,0) -> 1-shock eps=-1/2 -> (e^-1, -2 sinh(1/2)) -> 2-rarefaction
        // eps=2/5 -> (e^-1.8, -2 sinh(1/2) + 4/5); cell masses 1/2 each.
        const double v_right = -2.0 * std::sinh(0.5) + 0.8;
        d.a0 = 0.0;
        d.b0 = 0.5 + 0.5 * std::exp(-1.8);
        d.len = {0.5, 0.5 * std::exp(-1.8)};
        d.rho = {1.0, std::exp(1.8)};
        d.v = {0.0, v_right};
    } else if (name == "random-bv8") {
        // Deterministic splitmix64 stream; values frozen by the unit tests.
        std::uint64_t s = 0x9e3779b97f4a7c15ull;
        auto next01 = [&s]() {
            s += 0x9e3779b97f4a7c15ull;
            std::uint64_t z = s;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            z = z ^ (z >> 31);
            return static_cast<double>(z >> 11) * 0x1.0p-53;
        };
        d.a0 = 0.0;
        double x = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double L = 0.05 + 0.15 * next01();
            const double r = 0.5 + 1.7 * next01();
            const double w = -0.4 + 0.8 * next01();
            d.len.push_back(L);
            d.rho.push_back(r);
            d.v.push_back(w);
            x += L;
        }
        d.b0 = x;
    } else if (name == "flocking") {
        d.a0 = 0.0;
        d.b0 = 0.5;
        d.len = {0.125, 0.125, 0.125, 0.125};
        d.rho = {2.0, 2.04, 1.97, 2.02};
        d.v = {0.0, 0.0, 0.0, 0.0};
    } else {
        throw SchemaError("unknown builtin data set: " + name);
    }
    d.validate();
    return d;
}

} // namespace ftrack
