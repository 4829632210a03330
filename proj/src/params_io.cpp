#include "vlsim/params_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vlsim {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, int line, const std::string& msg) {
    std::string where = path.string();
    if (line > 0) where += ":" + std::to_string(line);
    throw std::runtime_error(where + ": " + msg);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct KeyVal {
    std::string value;
    int line = 0;
    bool used = false;
};

struct Section {
    std::string name;  // full bracket contents, e.g. "species quercus"
    int line = 0;
    std::map<std::string, KeyVal> keys;
};

std::vector<Section> parse_sections(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path, 0, "cannot open");
    std::vector<Section> sections;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view s = trim(raw);
        if (s.empty() || s.front() == '#' || s.front() == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(path, lineno, "unterminated section header");
            std::string name(trim(s.substr(1, s.size() - 2)));
            if (name.empty()) fail(path, lineno, "empty section name");
            sections.push_back({name, lineno, {}});
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) fail(path, lineno, "expected key = value");
        std::string key(trim(s.substr(0, eq)));
        std::string value(trim(s.substr(eq + 1)));
        if (key.empty()) fail(path, lineno, "empty key");
        if (sections.empty()) fail(path, lineno, "key outside any section: " + key);
        auto [it, inserted] = sections.back().keys.emplace(key, KeyVal{value, lineno, false});
        if (!inserted)
            fail(path, lineno, "duplicate key " + key + " (first at line " +
                                   std::to_string(it->second.line) + ")");
    }
    return sections;
}

// Pulls a required key out of `sec`, marking it consumed.
const KeyVal& take(const std::filesystem::path& path, Section& sec, const std::string& key) {
    auto it = sec.keys.find(key);
    if (it == sec.keys.end())
        fail(path, sec.line, "[" + sec.name + "] missing required key " + key);
    it->second.used = true;
    return it->second;
}

double take_double(const std::filesystem::path& path, Section& sec, const std::string& key) {
    const KeyVal& kv = take(path, sec, key);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(kv.value.c_str(), &end);
    if (end == kv.value.c_str() || *end != '\0' || errno == ERANGE)
        fail(path, kv.line, key + ": not a number: " + kv.value);
    return v;
}

std::int64_t take_int(const std::filesystem::path& path, Section& sec, const std::string& key) {
    const KeyVal& kv = take(path, sec, key);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(kv.value.c_str(), &end, 10);
    if (end == kv.value.c_str() || *end != '\0' || errno == ERANGE)
        fail(path, kv.line, key + ": not an integer: " + kv.value);
    return v;
}

bool take_bool(const std::filesystem::path& path, Section& sec, const std::string& key) {
    const KeyVal& kv = take(path, sec, key);
    if (kv.value == "true") return true;
    if (kv.value == "false") return false;
    fail(path, kv.line, key + ": expected true or false, got " + kv.value);
}

void reject_unknown(const std::filesystem::path& path, const Section& sec) {
    for (const auto& [key, kv] : sec.keys)
        if (!kv.used) fail(path, kv.line, "[" + sec.name + "] unknown key " + key);
}

SpeciesParams read_species(const std::filesystem::path& path, Section& sec,
                           const std::string& label) {
    SpeciesParams sp{};
    sp.type.label = label;
    const KeyVal& lf = take(path, sec, "lifeform");
    if (lf.value == "tree")
        sp.type.lifeform = Lifeform::tree;
    else if (lf.value == "shrub")
        sp.type.lifeform = Lifeform::shrub;
    else
        fail(path, lf.line, "lifeform: expected tree or shrub, got " + lf.value);
    sp.type.resprouter = take_bool(path, sec, "resprouter");
    sp.type.fire_tolerant = take_bool(path, sec, "fire_tolerant");
    sp.h_max = take_double(path, sec, "h_max");
    sp.hd_a = take_double(path, sec, "hd_a");
    sp.g_max = take_double(path, sec, "g_max");
    sp.d_max = take_double(path, sec, "d_max");
    const std::int64_t age_max = take_int(path, sec, "age_max");
    const std::int64_t age_adult = take_int(path, sec, "age_adult");
    if (age_max < 1 || age_max > 100000) fail(path, sec.line, "age_max: out of range");
    if (age_adult < 0 || age_adult > 100000) fail(path, sec.line, "age_adult: out of range");
    sp.age_max = static_cast<std::int32_t>(age_max);
    sp.age_adult = static_cast<std::int32_t>(age_adult);
    sp.c_seeds = take_int(path, sec, "c_seeds");
    sp.c_leaf = take_double(path, sec, "c_leaf");
    sp.p_b = take_double(path, sec, "p_b");
    sp.p_max = take_double(path, sec, "p_max");
    sp.g_rate = take_double(path, sec, "g_rate");
    sp.fire_kill_frac = take_double(path, sec, "fire_kill_frac");
    sp.terrain_factor[0] = take_double(path, sec, "terrain_factor_ridge");
    sp.terrain_factor[1] = take_double(path, sec, "terrain_factor_slope");
    sp.terrain_factor[2] = take_double(path, sec, "terrain_factor_valley");
    reject_unknown(path, sec);
    return sp;
}

void format_double(std::string& out, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // prefer the short spelling when it round-trips
    char shortbuf[48];
    for (int prec = 1; prec < 17; ++prec) {
        std::snprintf(shortbuf, sizeof shortbuf, "%.*g", prec, v);
        if (std::strtod(shortbuf, nullptr) == v) {
            out += shortbuf;
            return;
        }
    }
    out += buf;
}

}  // namespace

ModelParams read_params(const std::filesystem::path& path) {
    std::vector<Section> sections = parse_sections(path);
    ModelParams mp;
    std::size_t n_species = 0;
    bool have_fire = false, have_consts = false;
    for (Section& sec : sections) {
        if (sec.name.rfind("species ", 0) == 0) {
            const std::string label(trim(std::string_view(sec.name).substr(8)));
            if (label.empty()) fail(path, sec.line, "species section needs a label");
            if (n_species >= kNumSpecies)
                fail(path, sec.line, "more than " + std::to_string(kNumSpecies) +
                                         " species sections");
            for (std::size_t s = 0; s < n_species; ++s)
                if (mp.species[s].type.label == label)
                    fail(path, sec.line, "duplicate species label " + label);
            mp.species[n_species++] = read_species(path, sec, label);
        } else if (sec.name == "fire_regime") {
            if (have_fire) fail(path, sec.line, "duplicate [fire_regime] section");
            have_fire = true;
            mp.fire.ignition[0] = take_double(path, sec, "ridge");
            mp.fire.ignition[1] = take_double(path, sec, "slope");
            mp.fire.ignition[2] = take_double(path, sec, "valley");
            reject_unknown(path, sec);
        } else if (sec.name == "constants") {
            if (have_consts) fail(path, sec.line, "duplicate [constants] section");
            have_consts = true;
            mp.constants.ba_max_frac = take_double(path, sec, "ba_max_frac");
            mp.constants.k_shade = take_double(path, sec, "k_shade");
            mp.constants.d0 = take_double(path, sec, "d0");
            mp.constants.c_b = take_double(path, sec, "c_b");
            mp.constants.dead_decay = take_double(path, sec, "dead_decay");
            mp.constants.beta_age = take_double(path, sec, "beta_age");
            mp.constants.sigma_rel = take_double(path, sec, "sigma_rel");
            reject_unknown(path, sec);
        } else {
            fail(path, sec.line, "unknown section [" + sec.name + "]");
        }
    }
    if (n_species != kNumSpecies)
        fail(path, 0, "expected " + std::to_string(kNumSpecies) + " species sections, found " +
                          std::to_string(n_species));
    if (!have_fire) fail(path, 0, "missing [fire_regime] section");
    if (!have_consts) fail(path, 0, "missing [constants] section");
    try {
        mp.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, 0, e.what());
    }
    return mp;
}

void write_params(const ModelParams& mp, const std::filesystem::path& path) {
    std::string out;
    auto put = [&out](const std::string& key, double v) {
        out += key;
        out += " = ";
        format_double(out, v);
        out += "\n";
    };
    for (const SpeciesParams& sp : mp.species) {
        out += "[species " + sp.type.label + "]\n";
        out += std::string("lifeform = ") + (sp.type.lifeform == Lifeform::tree ? "tree" : "shrub") + "\n";
        out += std::string("resprouter = ") + (sp.type.resprouter ? "true" : "false") + "\n";
        out += std::string("fire_tolerant = ") + (sp.type.fire_tolerant ? "true" : "false") + "\n";
        put("h_max", sp.h_max);
        put("hd_a", sp.hd_a);
        put("g_max", sp.g_max);
        put("d_max", sp.d_max);
        out += "age_max = " + std::to_string(sp.age_max) + "\n";
        out += "age_adult = " + std::to_string(sp.age_adult) + "\n";
        out += "c_seeds = " + std::to_string(sp.c_seeds) + "\n";
        put("c_leaf", sp.c_leaf);
        put("p_b", sp.p_b);
        put("p_max", sp.p_max);
        put("g_rate", sp.g_rate);
        put("fire_kill_frac", sp.fire_kill_frac);
        put("terrain_factor_ridge", sp.terrain_factor[0]);
        put("terrain_factor_slope", sp.terrain_factor[1]);
        put("terrain_factor_valley", sp.terrain_factor[2]);
        out += "\n";
    }
    out += "[fire_regime]\n";
    put("ridge", mp.fire.ignition[0]);
    put("slope", mp.fire.ignition[1]);
    put("valley", mp.fire.ignition[2]);
    out += "\n[constants]\n";
    put("ba_max_frac", mp.constants.ba_max_frac);
    put("k_shade", mp.constants.k_shade);
    put("d0", mp.constants.d0);
    put("c_b", mp.constants.c_b);
    put("dead_decay", mp.constants.dead_decay);
    put("beta_age", mp.constants.beta_age);
    put("sigma_rel", mp.constants.sigma_rel);
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(path, 0, "cannot open for writing");
    f << out;
    if (!f) fail(path, 0, "write failed");
}

}  // namespace vlsim
