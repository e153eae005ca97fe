#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

// key = value pairs from tests/fixtures/oracle_values.txt.
inline const std::map<std::string, double>& oracle_fixture() {
    static const std::map<std::string, double> values = [] {
        std::map<std::string, double> m;
        std::ifstream in(std::string(FDSIC_FIXTURE_DIR) + "/oracle_values.txt");
        if (!in) throw std::runtime_error("missing oracle fixture");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(0, eq);
            key.erase(key.find_last_not_of(' ') + 1);
            m[key] = std::stod(line.substr(eq + 1));
        }
        return m;
    }();
    return values;
}

inline double fixture(const std::string& key) {
    const auto& m = oracle_fixture();
    const auto it = m.find(key);
    if (it == m.end()) throw std::runtime_error("fixture key missing: " + key);
    return it->second;
}
