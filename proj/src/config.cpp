#include "polaron/config.hpp"

#include "polaron/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace polaron {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw InvalidArgument("config: " + key + " expects a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw InvalidArgument("config: " + key + " expects an integer, got '" + v + "'");
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt(double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        if constexpr (std::is_floating_point_v<T>) s += fmt(v[i]);
        else s += std::to_string(v[i]);
    }
    return s;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

#define REAL(field) {#field, [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_double(k, v); }}
#define INT(field) {#field, [](RunConfig& c, const std::string& k, const std::string& v) { c.field = int(parse_int(k, v)); }}
#define TEXT(field) {#field, [](RunConfig& c, const std::string&, const std::string& v) { c.field = v; }}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        TEXT(preset), INT(grid_n), REAL(box_length), TEXT(coulomb), INT(modes), REAL(weight), INT(n_max),
        REAL(tau_final), INT(tau_steps), TEXT(initial_state), REAL(squeeze), REAL(bog_tau_final), INT(bog_tau_steps),
        REAL(number_tau_final), INT(number_tau_steps), REAL(pekar_tol), INT(pekar_max_iter), REAL(precond_shift),
        REAL(sc_tol), REAL(damping), REAL(cg_tol), INT(krylov_dim), REAL(krylov_tol), REAL(ode_dt), REAL(top_level_tol),
        REAL(memory_limit_mb), TEXT(out_dir),
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
             const long long s = parse_int(k, v);
             if (s < 0) throw InvalidArgument("config: seed must be non-negative");
             c.seed = std::uint64_t(s);
         }},
        {"alphas", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.alphas.clear();
             for (const auto& item : split_list(v)) c.alphas.push_back(parse_double(k, item));
         }},
        {"n_max_scan", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.n_max_scan.clear();
             for (const auto& item : split_list(v)) c.n_max_scan.push_back(int(parse_int(k, item)));
         }},
    };
    return table;
}

#undef REAL
#undef INT
#undef TEXT

}  // namespace

std::vector<std::string> preset_names() { return {"desk-small", "desk-standard", "pekar-hi"}; }

RunConfig preset_config(const std::string& name) {
    RunConfig c;
    c.preset = name;
    if (name == "desk-small") return c;
    if (name == "desk-standard") {
        c.grid_n = 16;
        c.modes = 4;
        c.weight = 30.0;
        c.n_max = 6;
        c.n_max_scan = {2, 4, 6};
        return c;
    }
    if (name == "pekar-hi") {
        c.grid_n = 48;
        c.box_length = 176.0;
        return c;
    }
    throw InvalidArgument("unknown preset '" + name + "' (expected desk-small, desk-standard or pekar-hi)");
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw InvalidArgument("config: unknown key '" + key + "'");
    it->second(cfg, key, value);
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path.string());
    std::string line;
    int lineno = 0;
    bool seen_setting = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("config: " + path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "preset") {
            if (seen_setting) throw InvalidArgument("config: preset must precede other keys");
            base = preset_config(value);
            continue;
        }
        apply_setting(base, key, value);
        seen_setting = true;
    }
    return base;
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
    return {
        {"preset", c.preset},
        {"grid_n", std::to_string(c.grid_n)},
        {"box_length", fmt(c.box_length)},
        {"coulomb", c.coulomb},
        {"modes", std::to_string(c.modes)},
        {"weight", fmt(c.weight)},
        {"n_max", std::to_string(c.n_max)},
        {"alphas", join(c.alphas)},
        {"tau_final", fmt(c.tau_final)},
        {"tau_steps", std::to_string(c.tau_steps)},
        {"initial_state", c.initial_state},
        {"squeeze", fmt(c.squeeze)},
        {"n_max_scan", join(c.n_max_scan)},
        {"bog_tau_final", fmt(c.bog_tau_final)},
        {"bog_tau_steps", std::to_string(c.bog_tau_steps)},
        {"number_tau_final", fmt(c.number_tau_final)},
        {"number_tau_steps", std::to_string(c.number_tau_steps)},
        {"pekar_tol", fmt(c.pekar_tol)},
        {"pekar_max_iter", std::to_string(c.pekar_max_iter)},
        {"precond_shift", fmt(c.precond_shift)},
        {"sc_tol", fmt(c.sc_tol)},
        {"damping", fmt(c.damping)},
        {"cg_tol", fmt(c.cg_tol)},
        {"krylov_dim", std::to_string(c.krylov_dim)},
        {"krylov_tol", fmt(c.krylov_tol)},
        {"ode_dt", fmt(c.ode_dt)},
        {"top_level_tol", fmt(c.top_level_tol)},
        {"memory_limit_mb", fmt(c.memory_limit_mb)},
        {"out_dir", c.out_dir},
        {"seed", std::to_string(c.seed)},
    };
}

void validate(const RunConfig& c) {
    for (double a : c.alphas) {
        if (!(a > 0.0)) throw InvalidArgument("config: every alpha must be positive");
    }
    if (c.alphas.empty()) throw InvalidArgument("config: no alpha values");
    if (!(c.tau_final > 0.0) || c.tau_steps < 1) throw InvalidArgument("config: tau schedule must be increasing");
    if (!(c.bog_tau_final > 0.0) || c.bog_tau_steps < 1) throw InvalidArgument("config: bogoliubov tau schedule invalid");
    if (!(c.number_tau_final > 0.0) || c.number_tau_steps < 2) throw InvalidArgument("config: number tau schedule invalid");
    if (c.initial_state != "vacuum" && c.initial_state != "squeezed") {
        throw InvalidArgument("config: initial_state must be vacuum or squeezed");
    }
    if (c.coulomb != "isolated" && c.coulomb != "jellium") throw InvalidArgument("config: coulomb must be isolated or jellium");
    if (!std::is_sorted(c.n_max_scan.begin(), c.n_max_scan.end())) throw InvalidArgument("config: n_max_scan must increase");
    if (c.n_max < 0) throw InvalidArgument("config: n_max must be non-negative");
    if (c.krylov_dim < 2) throw InvalidArgument("config: krylov_dim must be at least 2");
}

std::vector<double> tau_schedule(double tau_final, int steps) {
    std::vector<double> t(std::size_t(steps) + 1);
    for (int i = 0; i <= steps; ++i) t[std::size_t(i)] = tau_final * i / steps;
    return t;
}

}  // namespace polaron
