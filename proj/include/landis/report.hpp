#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

// Deterministic report plumbing: CSV tables with fixed float formatting and
// a JSON summary carrying the contract verdicts.  Identical config + seed
// must reproduce identical bytes, so nothing here touches clocks or
// addresses.

namespace landis::report {

inline constexpr int kSchemaVersion = 1;

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Csv {
  public:
    explicit Csv(std::vector<std::string> header) : cols_(std::move(header)) {
        for (std::size_t i = 0; i < cols_.size(); ++i) {
            if (i) body_ += ',';
            body_ += cols_[i];
        }
        body_ += '\n';
    }
    void row(const std::vector<std::string>& cells) {
        if (cells.size() != cols_.size()) throw std::invalid_argument("Csv: column mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ += ',';
            body_ += cells[i];
        }
        body_ += '\n';
    }
    const std::string& str() const { return body_; }
    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("Csv: cannot write '" + path + "'");
        out << body_;
    }

  private:
    std::vector<std::string> cols_;
    std::string body_;
};

// One named contract check with its measured value and requirement.
struct Contract {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string requirement;
};

class Summary {
  public:
    Summary(const std::string& subcommand, std::uint64_t seed) {
        j_["schema_version"] = kSchemaVersion;
        j_["subcommand"] = subcommand;
        j_["seed"] = seed;
        j_["contracts"] = nlohmann::json::array();
    }
    nlohmann::json& json() { return j_; }
    void add_contract(const Contract& c) {
        j_["contracts"].push_back({{"name", c.name},
                                   {"pass", c.pass},
                                   {"value", c.value},
                                   {"requirement", c.requirement}});
        if (!c.pass) failures_.push_back(c.name);
    }
    bool all_pass() const { return failures_.empty(); }
    void finalize() {
        j_["overall_pass"] = all_pass();
        j_["failures"] = failures_;
    }
    void write(const std::string& path) {
        finalize();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("Summary: cannot write '" + path + "'");
        out << j_.dump(2) << "\n";
    }

  private:
    nlohmann::json j_;
    std::vector<std::string> failures_;
};

// Deterministic per-task seed derivation (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t task) {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ull * (task + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace landis::report
