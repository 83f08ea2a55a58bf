// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/model_io.hpp"

#include <fstream>
#include <json.hpp>

#include "radp/errors.hpp"

namespace radp {

namespace {

using nlohmann::json;

json parse(std::istream& in, const char* what) {
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& err) {
        throw ValidationError(std::string(what) + ": " + err.what());
    }
    return doc;
}

/// "states": 3 or ["a","b","c"] — count plus optional names.
long read_index_set(const json& doc, const std::string& key, std::vector<std::string>* names,
                    bool required) {
    if (!doc.contains(key)) {
        if (required) throw ValidationError("model file: missing key '" + key + "'");
        return 0;
    }
    const json& entry = doc.at(key);
    if (entry.is_number_integer()) return entry.get<long>();
    if (entry.is_array()) {
        if (names) *names = entry.get<std::vector<std::string>>();
        return static_cast<long>(entry.size());
    }
    throw ValidationError("model file: '" + key + "' must be a count or a list of names");
}

numvec read_vector(const json& entry, const char* what) {
    if (!entry.is_array()) throw ValidationError(std::string(what) + " must be an array");
    return entry.get<numvec>();
}

UncertaintySet read_set(const json& entry, long x, long u) {
    const std::string where = " at (x=" + std::to_string(x) + ", u=" + std::to_string(u) + ")";
    if (!entry.is_object() || !entry.contains("type"))
        throw ValidationError("uncertainty entry missing 'type'" + where);
    const std::string type = entry.at("type").get<std::string>();
    if (type == "singleton") return UncertaintySet::singleton(read_vector(entry.at("p"), "p"));
    if (type == "interval")
        return UncertaintySet::interval_box(read_vector(entry.at("lo"), "lo"),
                                            read_vector(entry.at("hi"), "hi"));
    if (type == "vertices") {
        std::vector<numvec> vertices;
        for (const json& row : entry.at("points")) vertices.push_back(read_vector(row, "points"));
        return UncertaintySet::vertex_list(std::move(vertices));
    }
    throw ValidationError("unknown uncertainty type '" + type + "'" + where);
}

}  // namespace

RobustMdp load_model(std::istream& in) {
    const json doc = parse(in, "model file");

    RobustMdp model;
    model.num_states = read_index_set(doc, "states", &model.state_names, true);
    model.num_terminals = read_index_set(doc, "terminals", &model.terminal_names, false);
    model.num_actions = read_index_set(doc, "actions", &model.action_names, true);
    if (!doc.contains("discount")) throw ValidationError("model file: missing key 'discount'");
    model.discount = doc.at("discount").get<prec_t>();

    if (!doc.contains("rewards")) throw ValidationError("model file: missing key 'rewards'");
    for (const json& row : doc.at("rewards")) model.reward.push_back(read_vector(row, "rewards"));

    model.terminal_reward.assign(model.num_terminals, 0.0);
    if (doc.contains("terminal_rewards")) model.terminal_reward = doc.at("terminal_rewards").get<numvec>();

    if (!doc.contains("uncertainty")) throw ValidationError("model file: missing key 'uncertainty'");
    const json& table = doc.at("uncertainty");
    for (std::size_t x = 0; x < table.size(); x++) {
        std::vector<UncertaintySet> row;
        for (std::size_t u = 0; u < table[x].size(); u++)
            row.push_back(read_set(table[x][u], static_cast<long>(x), static_cast<long>(u)));
        model.uncertainty.push_back(std::move(row));
    }

    validate_or_throw(model);
    return model;
}

RobustMdp load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file: " + path);
    return load_model(in);
}

KernelFile load_kernel(std::istream& in) {
    const json doc = parse(in, "kernel file");
    if (!doc.contains("transitions")) throw ValidationError("kernel file: missing key 'transitions'");

    std::vector<numvec> rows;
    for (const json& row : doc.at("transitions")) rows.push_back(read_vector(row, "transitions"));
    if (rows.empty()) throw ValidationError("kernel file: empty transition table");

    KernelFile file;
    file.kernel.transitions.resize(static_cast<long>(rows.size()), static_cast<long>(rows[0].size()));
    for (std::size_t x = 0; x < rows.size(); x++) {
        if (rows[x].size() != rows[0].size())
            throw ValidationError("kernel file: ragged transition table");
        for (std::size_t j = 0; j < rows[x].size(); j++)
            file.kernel.transitions(static_cast<long>(x), static_cast<long>(j)) = rows[x][j];
    }

    const std::vector<std::string> problems = file.kernel.invariant_violations();
    if (!problems.empty()) {
        std::string msg = "invalid kernel:";
        for (const std::string& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }

    if (doc.contains("start")) file.start = doc.at("start").get<numvec>();
    return file;
}

KernelFile load_kernel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open kernel file: " + path);
    return load_kernel(in);
}

Eigen::MatrixXd load_feature_matrix(std::istream& in) {
    const json doc = parse(in, "feature file");
    if (!doc.contains("matrix")) throw ValidationError("feature file: missing key 'matrix'");

    std::vector<numvec> rows;
    for (const json& row : doc.at("matrix")) rows.push_back(read_vector(row, "matrix"));
    if (rows.empty()) throw ValidationError("feature file: empty matrix");

    Eigen::MatrixXd phi(static_cast<long>(rows.size()), static_cast<long>(rows[0].size()));
    for (std::size_t x = 0; x < rows.size(); x++) {
        if (rows[x].size() != rows[0].size()) throw ValidationError("feature file: ragged matrix");
        for (std::size_t j = 0; j < rows[x].size(); j++)
            phi(static_cast<long>(x), static_cast<long>(j)) = rows[x][j];
    }
    return phi;
}

Eigen::MatrixXd load_feature_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open feature file: " + path);
    return load_feature_matrix(in);
}

}  // namespace radp
