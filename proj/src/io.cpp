#include "nnhankel/io.hpp"

#include <fstream>

#include <json.hpp>

namespace nnh {

namespace {

using nlohmann::json;

json complex_to_json(std::complex<double> v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

std::complex<double> complex_from_json(const json& j) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
        throw ParseError("expected {re, im} object");
    }
    return {j.at("re").get<double>(), j.at("im").get<double>()};
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace

Instance load_instance(const std::filesystem::path& path) {
    const json j = load_json(path);
    try {
        const int n = j.at("n").get<int>();
        if (n < 1) throw ParseError("instance n must be >= 1");
        const auto& gen = j.at("hankel_generator");
        if (!gen.is_array() || static_cast<int>(gen.size()) != 2 * n - 1) {
            throw ParseError("hankel_generator must hold 2n-1 values");
        }
        Eigen::VectorXd c(2 * n - 1);
        for (int k = 0; k < 2 * n - 1; ++k) c[k] = gen.at(k).get<double>();

        const auto& xs = j.at("x");
        if (!xs.is_array() || static_cast<int>(xs.size()) != n) {
            throw ParseError("x must hold n entries");
        }
        Eigenpair pair;
        pair.lambda = complex_from_json(j.at("lambda"));
        pair.x.resize(n);
        for (int i = 0; i < n; ++i) pair.x[i] = complex_from_json(xs.at(i));
        return Instance{HankelGenerator(std::move(c)), std::move(pair)};
    } catch (const json::exception& e) {
        throw ParseError("bad instance file " + path.string() + ": " + e.what());
    }
}

void save_instance(const std::filesystem::path& path, const Instance& inst) {
    json j;
    j["n"] = inst.h.dim();
    j["hankel_generator"] = std::vector<double>(
        inst.h.coeffs().data(), inst.h.coeffs().data() + inst.h.coeffs().size());
    j["lambda"] = complex_to_json(inst.pair.lambda);
    json xs = json::array();
    for (Eigen::Index i = 0; i < inst.pair.x.size(); ++i) {
        xs.push_back(complex_to_json(inst.pair.x[i]));
    }
    j["x"] = std::move(xs);
    write_json(path, j);
}

SolveResult load_result(const std::filesystem::path& path) {
    const json j = load_json(path);
    try {
        SolveResult r;
        const std::string stage = j.at("stage").get<std::string>();
        if (stage == "A") {
            r.stage = Stage::ExactA;
        } else if (stage == "B") {
            r.stage = Stage::ResidualB;
        } else {
            throw ParseError("stage must be \"A\" or \"B\"");
        }
        const auto read_vec = [&](const char* key) {
            const auto& a = j.at(key);
            if (!a.is_array() || a.empty()) throw ParseError(std::string(key) + " must be an array");
            Eigen::VectorXd v(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a.at(i).get<double>();
            return v;
        };
        r.delta_generator = read_vec("delta_generator");
        r.corrected_generator = read_vec("corrected_generator");
        if (r.delta_generator.size() != r.corrected_generator.size()) {
            throw ParseError("delta/corrected generator lengths differ");
        }
        r.frob_norm = j.at("frob_norm").get<double>();
        r.eig_residual = j.at("eig_residual").get<double>();
        const auto& kkt = j.at("kkt");
        r.kkt.equality_residual = kkt.at("equality_residual").get<double>();
        r.kkt.bound_violation = kkt.at("bound_violation").get<double>();
        r.kkt.stationarity_residual = kkt.at("stationarity_residual").get<double>();
        r.kkt.complementarity_residual = kkt.at("complementarity_residual").get<double>();
        r.wall_seconds = j.at("wall_seconds").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError("bad result file " + path.string() + ": " + e.what());
    }
}

void save_result(const std::filesystem::path& path, const SolveResult& result) {
    json j;
    j["stage"] = result.stage == Stage::ExactA ? "A" : "B";
    j["delta_generator"] = std::vector<double>(
        result.delta_generator.data(),
        result.delta_generator.data() + result.delta_generator.size());
    j["corrected_generator"] = std::vector<double>(
        result.corrected_generator.data(),
        result.corrected_generator.data() + result.corrected_generator.size());
    j["frob_norm"] = result.frob_norm;
    j["eig_residual"] = result.eig_residual;
    j["kkt"] = json{{"equality_residual", result.kkt.equality_residual},
                    {"bound_violation", result.kkt.bound_violation},
                    {"stationarity_residual", result.kkt.stationarity_residual},
                    {"complementarity_residual", result.kkt.complementarity_residual}};
    j["wall_seconds"] = result.wall_seconds;
    write_json(path, j);
}

}  // namespace nnh
