#pragma once

#include "looplab/aitchison.hpp"
#include "looplab/circuit.hpp"
#include "looplab/probe.hpp"
#include "looplab/transport.hpp"

#include <Eigen/Dense>

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace looplab::io {

using json = nlohmann::ordered_json;

/// 17-significant-digit decimal text; enough to round-trip an IEEE double.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string matrix_csv(const Eigen::MatrixXd& M) {
    std::ostringstream out;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << format_double(M(i, j));
        }
        out << '\n';
    }
    return out.str();
}

inline std::string vector_csv(const Eigen::VectorXd& v) {
    std::ostringstream out;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_file: cannot open " + path.string());
    f << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_file: cannot open " + path.string());
    std::ostringstream out;
    out << f.rdbuf();
    return out.str();
}

// ---- wire formats ----

inline json gate_to_json(const circuit::Gate& g) {
    std::string table;
    table.reserve(g.table.size());
    for (auto b : g.table) table.push_back(b ? '1' : '0');
    return json{{"name", g.name}, {"arity", g.arity}, {"table", table}};
}

inline circuit::Gate gate_from_json(const json& j) {
    const std::string table = j.at("table").get<std::string>();
    std::vector<std::uint8_t> bits;
    bits.reserve(table.size());
    for (char c : table) {
        if (c != '0' && c != '1') throw std::invalid_argument("gate_from_json: table must be 0/1");
        bits.push_back(c == '1' ? 1 : 0);
    }
    return circuit::Gate(j.at("name").get<std::string>(), j.at("arity").get<int>(), std::move(bits));
}

/// Configurations travel as the bare gate-index array in topology order.
inline json configuration_to_json(const circuit::GateConfiguration& c) { return json(c.gate_at); }

inline circuit::GateConfiguration configuration_from_json(const json& j) {
    circuit::GateConfiguration c;
    c.gate_at = j.get<std::vector<int>>();
    return c;
}

inline json composition_to_json(const aitchison::Composition& p) {
    json arr = json::array();
    for (int i = 0; i < p.m(); ++i) arr.push_back(p[i]);
    return arr;
}

inline json ilr_vector_to_json(const Eigen::VectorXd& y, int m) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < y.size(); ++i) arr.push_back(y(i));
    return json{{"m", m}, {"coords", arr}};
}

inline json hypothesis_to_json(const probe::GcnHypothesis& h) {
    json weights = json::array();
    for (const auto& W : h.weights)
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) weights.push_back(W(r, c));
    return json{{"L", h.L},
                {"p", h.p},
                {"dims", h.dims},
                {"beta", h.budgets},
                {"activation", probe::activation_name(h.activation)},
                {"weights", weights}};
}

inline probe::GcnHypothesis hypothesis_from_json(const json& j) {
    probe::GcnHypothesis h;
    h.L = j.at("L").get<int>();
    h.p = j.at("p").get<int>();
    h.dims = j.at("dims").get<std::vector<int>>();
    h.budgets = j.at("beta").get<std::vector<double>>();
    h.activation = probe::parse_activation(j.at("activation").get<std::string>());
    const auto flat = j.at("weights").get<std::vector<double>>();
    std::size_t pos = 0;
    for (int l = 0; l < h.L; ++l) {
        Eigen::MatrixXd W(h.dims[l + 1], h.dims[l]);
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = flat.at(pos++);
        h.weights.push_back(std::move(W));
    }
    if (pos != flat.size()) throw std::invalid_argument("hypothesis_from_json: weight count mismatch");
    h.validate();
    return h;
}

inline json embedding_to_json(const transport::LineEmbedding& e) {
    json coords = json::array();
    for (Eigen::Index i = 0; i < e.coords.size(); ++i) coords.push_back(e.coords(i));
    return json{{"coords", coords}, {"R", e.R}, {"S", e.S}, {"distortion", e.distortion()}};
}

/// Transport plans as sparse (i, j, mass) triples.
inline std::string plan_to_csv(const transport::TransportPlan& plan) {
    std::ostringstream out;
    out << "i,j,mass\n";
    for (Eigen::Index i = 0; i < plan.flow.rows(); ++i)
        for (Eigen::Index j = 0; j < plan.flow.cols(); ++j)
            if (plan.flow(i, j) > 0.0)
                out << i << ',' << j << ',' << format_double(plan.flow(i, j)) << '\n';
    return out.str();
}

/// FNV-1a 64-bit content hash, hex-encoded; used for artifact checksums.
inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Records what a CLI run produced. File names are stored relative to the
/// output directory so reruns into different directories stay byte-identical.
class RunManifest {
  public:
    RunManifest(std::string subcommand, std::string config_ref, std::uint64_t seed)
        : subcommand_(std::move(subcommand)), config_ref_(std::move(config_ref)), seed_(seed) {}

    void add(const std::string& name, const std::string& content) {
        artifacts_.push_back({name, fnv1a_hex(content)});
    }

    std::string to_json() const {
        json j;
        j["subcommand"] = subcommand_;
        j["config"] = config_ref_;
        j["seed"] = seed_;
        json files = json::array();
        for (const auto& [name, hash] : artifacts_) {
            json f;
            f["name"] = name;
            f["fnv1a64"] = hash;
            files.push_back(f);
        }
        j["artifacts"] = files;
        return j.dump(2) + "\n";
    }

  private:
    std::string subcommand_;
    std::string config_ref_;
    std::uint64_t seed_ = 0;
    std::vector<std::pair<std::string, std::string>> artifacts_;
};

/// Writes a named artifact and registers it in the manifest.
class ArtifactWriter {
  public:
    ArtifactWriter(std::filesystem::path dir, RunManifest& manifest)
        : dir_(std::move(dir)), manifest_(manifest) {
        std::filesystem::create_directories(dir_);
    }

    void emit(const std::string& name, const std::string& content) {
        write_file(dir_ / name, content);
        manifest_.add(name, content);
    }

    void finalize() { write_file(dir_ / "manifest.json", manifest_.to_json()); }

  private:
    std::filesystem::path dir_;
    RunManifest& manifest_;
};

} // namespace looplab::io
