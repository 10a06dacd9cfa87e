#pragma once
#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "lattice.hpp"
#include "step_measure.hpp"

namespace solwalk {

// measure files: {"kind":"product","gamma":g,"mu_z":[{"z":v,"w":w},...],...},
// {"kind":"atoms","atoms":[{"z":..,"x":..,"y":..,"w":..},...]}, or
// {"kind":"lattice","T":[[a,b],[c,d]],"atoms":[{"r":..,"p":..,"q":..,"w":..},...]};
// weights must sum to 1 within 1e-9 on load and are renormalized exactly
struct MeasureFile {
    StepMeasure step;                       // walkable form (lattice kind arrives embedded)
    std::optional<LatticeSpec> spec;        // lattice kind only
    std::optional<LatticeMeasure> lattice;  // lattice kind only, exact coordinates
};

namespace detail {

inline double json_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw validation_error(std::string("measure file: missing numeric field ") + key);
    return j[key].get<double>();
}

inline std::vector<std::pair<double, double>> marginal_from_json(const nlohmann::json& j,
                                                                 const char* name, const char* key) {
    if (!j.contains(name) || !j[name].is_array())
        throw validation_error(std::string("measure file: missing marginal ") + name);
    std::vector<std::pair<double, double>> out;
    double total = 0;
    for (const auto& atom : j[name]) {
        out.push_back({json_number(atom, key), json_number(atom, "w")});
        total += out.back().second;
    }
    if (out.empty()) throw validation_error(std::string("measure file: empty marginal ") + name);
    if (std::abs(total - 1.0) > 1e-9)
        throw validation_error(std::string("measure file: weights of ") + name +
                               " must sum to 1 within 1e-9");
    for (auto& [v, w] : out) w /= total;
    return out;
}

inline std::vector<long long> poly_from_json(const nlohmann::json& j) {
    std::vector<long long> poly;
    for (const auto& c : j) {
        if (!c.is_number_integer()) throw validation_error("measure file: pisot_poly must be integers");
        poly.push_back(c.get<long long>());
    }
    return poly;
}

}  // namespace detail

inline nlohmann::json lattice_spec_to_json(const LatticeSpec& spec) {
    return {{"T", {{spec.T[0][0], spec.T[0][1]}, {spec.T[1][0], spec.T[1][1]}}}};
}

inline LatticeSpec lattice_spec_from_json(const nlohmann::json& j) {
    if (!j.contains("T") || !j["T"].is_array() || j["T"].size() != 2 || !j["T"][0].is_array() ||
        j["T"][0].size() != 2 || !j["T"][1].is_array() || j["T"][1].size() != 2)
        throw validation_error("lattice spec: T must be a 2x2 integer matrix");
    std::array<std::array<long long, 2>, 2> T;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            if (!j["T"][r][c].is_number_integer())
                throw validation_error("lattice spec: T must be a 2x2 integer matrix");
            T[r][c] = j["T"][r][c].get<long long>();
        }
    return make_lattice(T);
}

inline nlohmann::json measure_to_json(const StepMeasure& mu) {
    validate_step_measure(mu);
    nlohmann::json j;
    if (mu.product_form) {
        const ProductForm& pf = *mu.product_form;
        j["kind"] = "product";
        j["gamma"] = pf.gamma;
        auto marginal = [](const std::vector<std::pair<double, double>>& m, const char* key) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& [v, w] : m) arr.push_back({{key, v}, {"w", w}});
            return arr;
        };
        j["mu_z"] = marginal(pf.mu_z, "z");
        j["mu_x"] = marginal(pf.mu_x, "x");
        j["mu_y"] = marginal(pf.mu_y, "y");
    } else {
        j["kind"] = "atoms";
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [g, w] : mu.atoms)
            arr.push_back({{"z", g.z}, {"x", g.x}, {"y", g.y}, {"w", w}});
        j["atoms"] = arr;
    }
    if (!mu.pisot_poly.empty()) j["pisot_poly"] = mu.pisot_poly;
    return j;
}

inline nlohmann::json measure_to_json(const LatticeSpec& spec, const LatticeMeasure& mu) {
    validate_measure(mu);
    nlohmann::json j = lattice_spec_to_json(spec);
    j["kind"] = "lattice";
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [e, w] : mu.atoms) {
        if (e.p < std::numeric_limits<long long>::min() || e.p > std::numeric_limits<long long>::max() ||
            e.q < std::numeric_limits<long long>::min() || e.q > std::numeric_limits<long long>::max())
            throw validation_error("measure file: lattice coordinates exceed the file format range");
        arr.push_back({{"r", e.r},
                       {"p", e.p.convert_to<long long>()},
                       {"q", e.q.convert_to<long long>()},
                       {"w", w}});
    }
    j["atoms"] = arr;
    return j;
}

inline MeasureFile measure_from_json(const nlohmann::json& j) {
    if (!j.contains("kind") || !j["kind"].is_string())
        throw validation_error("measure file: missing kind");
    const std::string kind = j["kind"].get<std::string>();
    MeasureFile out;
    if (kind == "product") {
        ProductForm pf;
        pf.gamma = detail::json_number(j, "gamma");
        pf.mu_z = detail::marginal_from_json(j, "mu_z", "z");
        pf.mu_x = detail::marginal_from_json(j, "mu_x", "x");
        pf.mu_y = detail::marginal_from_json(j, "mu_y", "y");
        out.step = from_product_form(std::move(pf));
    } else if (kind == "atoms") {
        if (!j.contains("atoms") || !j["atoms"].is_array())
            throw validation_error("measure file: missing atoms");
        double total = 0;
        for (const auto& atom : j["atoms"]) {
            out.step.atoms.push_back({{detail::json_number(atom, "z"), detail::json_number(atom, "x"),
                                       detail::json_number(atom, "y")},
                                      detail::json_number(atom, "w")});
            total += out.step.atoms.back().second;
        }
        if (out.step.atoms.empty()) throw validation_error("measure file: no atoms");
        if (std::abs(total - 1.0) > 1e-9)
            throw validation_error("measure file: weights must sum to 1 within 1e-9");
        for (auto& [g, w] : out.step.atoms) w /= total;
        validate_step_measure(out.step);
    } else if (kind == "lattice") {
        out.spec = lattice_spec_from_json(j);
        if (!j.contains("atoms") || !j["atoms"].is_array())
            throw validation_error("measure file: missing atoms");
        LatticeMeasure lm;
        double total = 0;
        for (const auto& atom : j["atoms"]) {
            if (!atom.contains("r") || !atom["r"].is_number_integer() || !atom.contains("p") ||
                !atom["p"].is_number_integer() || !atom.contains("q") || !atom["q"].is_number_integer())
                throw validation_error("measure file: lattice atoms need integer r, p, q");
            lm.atoms.push_back({{atom["r"].get<long long>(), bigint(atom["p"].get<long long>()),
                                 bigint(atom["q"].get<long long>())},
                                detail::json_number(atom, "w")});
            total += lm.atoms.back().second;
        }
        if (lm.atoms.empty()) throw validation_error("measure file: no atoms");
        if (std::abs(total - 1.0) > 1e-9)
            throw validation_error("measure file: weights must sum to 1 within 1e-9");
        for (auto& [e, w] : lm.atoms) w /= total;
        out.lattice = normalize_measure(*out.spec, std::move(lm));
        out.step = embed_measure(*out.spec, *out.lattice);
    } else {
        throw validation_error("measure file: unknown kind " + kind);
    }
    if (j.contains("pisot_poly")) out.step.pisot_poly = detail::poly_from_json(j["pisot_poly"]);
    return out;
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(path + ": " + e.what());
    }
    return j;
}

inline MeasureFile load_measure(const std::string& path) { return measure_from_json(load_json(path)); }

inline void save_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

// sample files: CSV is one %.17g float per line; binary is the 8-byte magic
// "SOLXI001", a little-endian u64 count, then count little-endian IEEE doubles
enum class SampleFormat { Csv, Binary };

namespace detail {

constexpr char sample_magic[8] = {'S', 'O', 'L', 'X', 'I', '0', '0', '1'};

inline void put_u64_le(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

inline std::uint64_t get_u64_le(std::istream& is) {
    char b[8];
    is.read(b, 8);
    if (!is) throw validation_error("sample file: truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
}

}  // namespace detail

inline void write_samples_csv(std::ostream& os, const std::vector<double>& v) {
    char buf[40];
    for (double s : v) {
        std::snprintf(buf, sizeof buf, "%.17g\n", s);
        os << buf;
    }
}

inline void write_samples_binary(std::ostream& os, const std::vector<double>& v) {
    os.write(detail::sample_magic, 8);
    detail::put_u64_le(os, v.size());
    for (double s : v) detail::put_u64_le(os, std::bit_cast<std::uint64_t>(s));
}

inline void write_samples(const std::string& path, const std::vector<double>& v, SampleFormat fmt) {
    std::ofstream out(path, fmt == SampleFormat::Binary ? std::ios::binary : std::ios::out);
    if (!out) throw validation_error("cannot open " + path + " for writing");
    if (fmt == SampleFormat::Binary)
        write_samples_binary(out, v);
    else
        write_samples_csv(out, v);
    if (!out) throw validation_error("write failed: " + path);
}

// format detected by the magic prefix
inline std::vector<double> read_samples(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open " + path);
    char head[8] = {};
    in.read(head, 8);
    if (in.gcount() == 8 && std::equal(head, head + 8, detail::sample_magic)) {
        std::uint64_t n = detail::get_u64_le(in);
        std::vector<double> v;
        v.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i)
            v.push_back(std::bit_cast<double>(detail::get_u64_le(in)));
        return v;
    }
    in.clear();
    in.seekg(0);
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        // strtod, not stod: stod raises out_of_range on subnormals
        const char* cs = line.c_str();
        char* end = nullptr;
        double s = std::strtod(cs, &end);
        while (end && (*end == ' ' || *end == '\r')) ++end;
        if (end == cs || *end != '\0')
            throw validation_error(path + ": not a sample file (bad line '" + line + "')");
        v.push_back(s);
    }
    return v;
}

// "1,-3,1" -> {1, -3, 1}
inline std::vector<long long> parse_poly(const std::string& s) {
    std::vector<long long> poly;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        long long c;
        try {
            c = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            throw validation_error("polynomial: bad coefficient '" + tok + "'");
        }
        while (pos < tok.size() && tok[pos] == ' ') ++pos;
        if (pos != tok.size()) throw validation_error("polynomial: bad coefficient '" + tok + "'");
        poly.push_back(c);
    }
    if (poly.empty()) throw validation_error("polynomial: empty coefficient list");
    return poly;
}

}  // namespace solwalk
