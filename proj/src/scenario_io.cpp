#include "fogrid/scenario_io.hpp"

#include "fogrid/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace fogrid {

using nlohmann::json;

namespace {

Parasitics default_parasitics() { return {0.75, 0.5, 0.2}; }

// Best-effort line of the first occurrence of "key" in the source text.
int line_of_key(std::string_view text, const std::string& key) {
    const std::string quoted = "\"" + key + "\"";
    const std::size_t at = text.find(quoted);
    if (at == std::string_view::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(at), '\n'));
}

int line_of_offset(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::string& path, const std::string& why) const {
        const std::size_t dot = path.find_last_of('.');
        const std::string leaf = dot == std::string::npos ? path : path.substr(dot + 1);
        const int line = line_of_key(text_, leaf);
        throw ParseError("scenario line " + std::to_string(line) + ", field '" + path + "': " + why, line, path);
    }

    void object(const json& j, const std::string& path,
                std::initializer_list<std::pair<const char*, std::function<void(const json&, const std::string&)>>> fields) const {
        if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string sub = path.empty() ? it.key() : path + "." + it.key();
            auto f = std::find_if(fields.begin(), fields.end(), [&](const auto& p) { return it.key() == p.first; });
            if (f == fields.end()) fail(sub, "unknown key");
            f->second(it.value(), sub);
        }
    }

    void number(const json& j, const std::string& path, double& out) const {
        if (j.is_number()) {
            out = j.get<double>();
        } else if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "Infinity")) {
            out = std::numeric_limits<double>::infinity();
        } else {
            fail(path, "expected a number");
        }
    }

    template <class Int>
    void integer(const json& j, const std::string& path, Int& out) const {
        if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected an integer");
        if constexpr (std::is_unsigned_v<Int>) {
            if (j.is_number_integer() && j.get<long long>() < 0) fail(path, "expected a non-negative integer");
        }
        out = j.get<Int>();
    }

    void boolean(const json& j, const std::string& path, bool& out) const {
        if (!j.is_boolean()) fail(path, "expected true or false");
        out = j.get<bool>();
    }

    void string(const json& j, const std::string& path, std::string& out) const {
        if (!j.is_string()) fail(path, "expected a string");
        out = j.get<std::string>();
    }

private:
    std::string_view text_;
};

#define FIELD_NUM(obj, name) {#name, [&](const json& v, const std::string& p) { r.number(v, p, (obj).name); }}
#define FIELD_INT(obj, name) {#name, [&](const json& v, const std::string& p) { r.integer(v, p, (obj).name); }}

void read_scenario(const Reader& r, const json& root, Scenario& sc) {
    r.object(root, "", {
        {"schedule", [&](const json& j, const std::string& path) {
            if (!j.is_array()) r.fail(path, "expected an array of segments");
            sc.schedule.clear();
            for (std::size_t k = 0; k < j.size(); ++k) {
                ScheduleSegment seg;
                const std::string p = path + "[" + std::to_string(k) + "]";
                r.object(j[k], p, {FIELD_NUM(seg, duration), FIELD_NUM(seg, irradiance), FIELD_NUM(seg, temperature)});
                sc.schedule.push_back(seg);
            }
        }},
        {"pv", [&](const json& j, const std::string& path) {
            r.object(j, path, {
                {"datasheet", [&](const json& d, const std::string& p) {
                    PanelDatasheet& ds = sc.datasheet;
                    r.object(d, p, {FIELD_NUM(ds, v_oc), FIELD_NUM(ds, i_sc), FIELD_NUM(ds, v_mpp),
                                    FIELD_NUM(ds, p_max), FIELD_INT(ds, n_s_cells)});
                }},
                {"fit", [&](const json& d, const std::string& p) {
                    FitOptions& f = sc.fit;
                    r.object(d, p, {FIELD_NUM(f, ideality), FIELD_NUM(f, k_i),
                                    {"ideal", [&](const json& v, const std::string& q) { r.boolean(v, q, f.ideal); }}});
                }},
                FIELD_INT(sc, n_series_panels),
                FIELD_INT(sc, n_parallel_strings),
            });
        }},
        {"plant", [&](const json& j, const std::string& path) {
            PlantParams& pl = sc.plant;
            r.object(j, path, {
                FIELD_NUM(pl, c_pv), FIELD_NUM(pl, l_o), FIELD_NUM(pl, c_dc), FIELD_NUM(pl, l_g),
                FIELD_NUM(pl, grid_v_rms), FIELD_NUM(pl, grid_freq), FIELD_NUM(pl, f_sw_boost), FIELD_NUM(pl, f_sw_inv),
                {"parasitics", [&](const json& d, const std::string& p) {
                    Parasitics& pa = pl.parasitics;
                    r.object(d, p, {FIELD_NUM(pa, r_lo), FIELD_NUM(pa, r_lg), FIELD_NUM(pa, r_on)});
                }},
            });
        }},
        {"controller", [&](const json& j, const std::string& path) {
            ControllerConfig& c = sc.controller;
            r.object(j, path, {
                FIELD_NUM(c, c1), FIELD_NUM(c, c2), FIELD_NUM(c, c3), FIELD_NUM(c, kp), FIELD_NUM(c, ki),
                FIELD_NUM(c, alpha1), FIELD_NUM(c, alpha2), FIELD_NUM(c, alpha_pi),
                FIELD_NUM(c, voltage_error_scale), FIELD_NUM(c, grid_error_scale),
                FIELD_NUM(c, mppt_step), FIELD_NUM(c, mppt_period), FIELD_NUM(c, v_dc_ref),
                FIELD_NUM(c, rate_voltage_loop), FIELD_NUM(c, rate_current_loop),
                FIELD_NUM(c, ref_derivative_corner_hz), FIELD_NUM(c, x3_floor), FIELD_NUM(c, rated_power),
                FIELD_NUM(c, current_limit_factor), FIELD_INT(c, memory),
            });
        }},
        {"simulation", [&](const json& j, const std::string& path) {
            r.object(j, path, {
                {"mode", [&](const json& v, const std::string& p) {
                    std::string m;
                    r.string(v, p, m);
                    if (m == "fo") sc.mode = ControllerMode::FractionalOrder;
                    else if (m == "io") sc.mode = ControllerMode::IntegerOrder;
                    else r.fail(p, "expected \"fo\" or \"io\"");
                }},
                {"fidelity", [&](const json& v, const std::string& p) {
                    std::string f;
                    r.string(v, p, f);
                    if (f == "averaged") sc.fidelity = Fidelity::Averaged;
                    else if (f == "switched") sc.fidelity = Fidelity::Switched;
                    else r.fail(p, "expected \"averaged\" or \"switched\"");
                }},
                {"dt", [&](const json& v, const std::string& p) {
                    if (v.is_null()) {
                        sc.dt.reset();
                        return;
                    }
                    double d = 0.0;
                    r.number(v, p, d);
                    sc.dt = d;
                }},
                {"initial_state", [&](const json& v, const std::string& p) {
                    if (v.is_null()) {
                        sc.initial_state.reset();
                        return;
                    }
                    PlantState s;
                    r.object(v, p, {FIELD_NUM(s, x1), FIELD_NUM(s, x2), FIELD_NUM(s, x3), FIELD_NUM(s, x4)});
                    sc.initial_state = s;
                }},
                FIELD_INT(sc, decimation),
                FIELD_NUM(sc, tail_span),
            });
        }},
    });
}

#undef FIELD_NUM
#undef FIELD_INT

json number_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

} // namespace

const char* mode_name(ControllerMode m) noexcept {
    return m == ControllerMode::IntegerOrder ? "io" : "fo";
}

const char* fidelity_name(Fidelity f) noexcept {
    return f == Fidelity::Switched ? "switched" : "averaged";
}

std::vector<std::string> builtin_scenario_names() { return {"paper", "ideal-stc"}; }

bool is_builtin_scenario(std::string_view name) {
    const auto names = builtin_scenario_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario builtin_scenario(std::string_view name) {
    Scenario sc;
    if (name == "paper") {
        sc.schedule = {{0.5, 1000.0, 25.0}, {0.3, 800.0, 30.0}, {0.2, 700.0, 35.0}};
        sc.plant.parasitics = default_parasitics();
        return sc;
    }
    if (name == "ideal-stc") {
        sc.schedule = {{0.5, 1000.0, 25.0}};
        sc.plant.parasitics = Parasitics{};
        return sc;
    }
    throw ConfigError("unknown builtin scenario '" + std::string(name) + "'");
}

Scenario parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const int line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError("scenario line " + std::to_string(line) + ": malformed JSON", line, "");
    }
    Scenario sc = builtin_scenario("paper");
    read_scenario(Reader(text), root, sc);
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& path_or_builtin) {
    if (is_builtin_scenario(path_or_builtin)) return builtin_scenario(path_or_builtin);
    std::ifstream in(path_or_builtin, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file '" + path_or_builtin + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& sc) {
    json root;
    json sched = json::array();
    for (const auto& s : sc.schedule) {
        sched.push_back({{"duration", s.duration}, {"irradiance", s.irradiance}, {"temperature", s.temperature}});
    }
    root["schedule"] = sched;
    const PanelDatasheet& ds = sc.datasheet;
    root["pv"] = {
        {"datasheet", {{"v_oc", ds.v_oc}, {"i_sc", ds.i_sc}, {"v_mpp", ds.v_mpp}, {"p_max", ds.p_max},
                       {"n_s_cells", ds.n_s_cells}}},
        {"fit", {{"ideality", sc.fit.ideality}, {"k_i", sc.fit.k_i}, {"ideal", sc.fit.ideal}}},
        {"n_series_panels", sc.n_series_panels},
        {"n_parallel_strings", sc.n_parallel_strings},
    };
    const PlantParams& p = sc.plant;
    root["plant"] = {
        {"c_pv", p.c_pv}, {"l_o", p.l_o}, {"c_dc", p.c_dc}, {"l_g", p.l_g},
        {"grid_v_rms", p.grid_v_rms}, {"grid_freq", p.grid_freq},
        {"f_sw_boost", p.f_sw_boost}, {"f_sw_inv", p.f_sw_inv},
        {"parasitics", {{"r_lo", p.parasitics.r_lo}, {"r_lg", p.parasitics.r_lg}, {"r_on", p.parasitics.r_on}}},
    };
    const ControllerConfig& c = sc.controller;
    root["controller"] = {
        {"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"kp", c.kp}, {"ki", c.ki},
        {"alpha1", c.alpha1}, {"alpha2", c.alpha2}, {"alpha_pi", c.alpha_pi},
        {"voltage_error_scale", c.voltage_error_scale}, {"grid_error_scale", c.grid_error_scale},
        {"mppt_step", c.mppt_step}, {"mppt_period", c.mppt_period}, {"v_dc_ref", c.v_dc_ref},
        {"rate_voltage_loop", c.rate_voltage_loop}, {"rate_current_loop", c.rate_current_loop},
        {"ref_derivative_corner_hz", c.ref_derivative_corner_hz}, {"x3_floor", c.x3_floor},
        {"rated_power", number_json(c.rated_power)}, {"current_limit_factor", c.current_limit_factor},
        {"memory", c.memory},
    };
    json sim = {
        {"mode", mode_name(sc.mode)},
        {"fidelity", fidelity_name(sc.fidelity)},
        {"dt", sc.dt ? json(*sc.dt) : json(nullptr)},
        {"decimation", sc.decimation},
        {"tail_span", sc.tail_span},
    };
    if (sc.initial_state) {
        const PlantState& s = *sc.initial_state;
        sim["initial_state"] = {{"x1", s.x1}, {"x2", s.x2}, {"x3", s.x3}, {"x4", s.x4}};
    } else {
        sim["initial_state"] = nullptr;
    }
    root["simulation"] = sim;
    return root.dump(2) + "\n";
}

} // namespace fogrid
