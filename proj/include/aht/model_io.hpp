// model_io.hpp -- JSON model files and a content hash for run metadata.
//
// Schema:
//   {
//     "M": 2,
//     "actions": ["probe-a"],
//     "alphabet": 2,
//     "kernels": [ [[0.75, 0.25], [0.25, 0.75]] ]   // K matrices, M rows x |Z| cols
//   }
#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aht/model.hpp"

namespace aht {

// Rows off by at most this much are renormalized at load; anything worse is rejected.
inline constexpr double kRowNormalizeTol = 1e-9;

inline Model model_from_json(const nlohmann::json& j) {
    Model m;
    m.num_hypotheses = j.at("M").get<size_t>();
    m.actions = j.at("actions").get<std::vector<std::string>>();
    m.alphabet_size = j.at("alphabet").get<size_t>();
    m.kernels = j.at("kernels").get<std::vector<std::vector<std::vector<double>>>>();
    m.check_shape();
    for (auto& per_action : m.kernels) {
        for (auto& r : per_action) {
            double s = 0.0;
            for (double v : r) {
                if (v < 0.0) throw std::invalid_argument("model file: negative kernel entry");
                s += v;
            }
            if (std::abs(s - 1.0) > kRowNormalizeTol)
                throw std::invalid_argument("model file: kernel row sum off by more than 1e-9");
            for (double& v : r) v /= s;
        }
    }
    return m;
}

inline nlohmann::json model_to_json(const Model& m) {
    nlohmann::json j;
    j["M"] = m.num_hypotheses;
    j["actions"] = m.actions;
    j["alphabet"] = m.alphabet_size;
    j["kernels"] = m.kernels;
    return j;
}

inline Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    nlohmann::json j;
    in >> j;
    return model_from_json(j);
}

inline void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << model_to_json(m).dump(2) << "\n";
}

// FNV-1a over a canonical serialization; stable across platforms.
inline std::string model_hash(const Model& m) {
    std::ostringstream os;
    os << m.num_hypotheses << '|' << m.alphabet_size;
    for (const auto& a : m.actions) os << '|' << a;
    os << std::setprecision(17);
    for (const auto& per_action : m.kernels)
        for (const auto& r : per_action)
            for (double v : r) os << '|' << v;
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : os.str()) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << h;
    return hex.str();
}

}  // namespace aht
