// SPDX-License-Identifier: Apache-2.0

#include "lifi/neural/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "lifi/io/atomic_file.hpp"

namespace lifi::neural {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vec_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json obj;
    obj["rows"] = m.rows();
    obj["cols"] = m.cols();
    json arr = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
    obj["data"] = std::move(arr);
    return obj;
}

Eigen::MatrixXd mat_from_json(const json& obj) {
    const auto rows = obj.at("rows").get<Eigen::Index>();
    const auto cols = obj.at("cols").get<Eigen::Index>();
    const auto& arr = obj.at("data");
    if (static_cast<Eigen::Index>(arr.size()) != rows * cols) {
        throw Error(Errc::parse, "model checkpoint: matrix payload size mismatch");
    }
    Eigen::MatrixXd m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = arr[i++].get<double>();
    return m;
}

json conv_to_json(const Conv2d& conv) {
    json obj;
    obj["type"] = "conv2d";
    obj["in"] = conv.in_channels();
    obj["out"] = conv.out_channels();
    obj["kernel"] = conv.kernel();
    obj["w"] = conv.w;
    obj["b"] = conv.b;
    return obj;
}

Conv2d conv_from_json(const json& obj, rng::Generator& gen) {
    Conv2d conv(obj.at("in").get<int>(), obj.at("out").get<int>(), obj.at("kernel").get<int>(), gen,
                0.0);
    const auto w = obj.at("w").get<std::vector<double>>();
    const auto b = obj.at("b").get<std::vector<double>>();
    if (w.size() != conv.w.size() || b.size() != conv.b.size()) {
        throw Error(Errc::parse, "model checkpoint: conv weight size mismatch");
    }
    conv.w = w;
    conv.b = b;
    return conv;
}

json bn_to_json(const BatchNorm2d& bn) {
    json obj;
    obj["type"] = "batchnorm2d";
    obj["channels"] = bn.channels();
    obj["gamma"] = bn.gamma;
    obj["beta"] = bn.beta;
    obj["running_mean"] = bn.running_mean;
    obj["running_var"] = bn.running_var;
    obj["eps"] = bn.eps;
    obj["momentum"] = bn.momentum;
    return obj;
}

BatchNorm2d bn_from_json(const json& obj) {
    BatchNorm2d bn(obj.at("channels").get<int>(), obj.at("eps").get<double>(),
                   obj.at("momentum").get<double>());
    bn.gamma = obj.at("gamma").get<std::vector<double>>();
    bn.beta = obj.at("beta").get<std::vector<double>>();
    bn.running_mean = obj.at("running_mean").get<std::vector<double>>();
    bn.running_var = obj.at("running_var").get<std::vector<double>>();
    const auto c = static_cast<std::size_t>(bn.channels());
    if (bn.gamma.size() != c || bn.beta.size() != c || bn.running_mean.size() != c ||
        bn.running_var.size() != c) {
        throw Error(Errc::parse, "model checkpoint: batch norm size mismatch");
    }
    return bn;
}

json gate_to_json(const GateWeights& g) {
    json obj;
    obj["w_in"] = vec_to_json(g.w_in);
    obj["w_rec"] = mat_to_json(g.w_rec);
    obj["b"] = vec_to_json(g.b);
    return obj;
}

GateWeights gate_from_json(const json& obj) {
    GateWeights g;
    g.w_in = vec_from_json(obj.at("w_in"));
    g.w_rec = mat_from_json(obj.at("w_rec"));
    g.b = vec_from_json(obj.at("b"));
    return g;
}

json load_checkpoint_json(const std::string& path, const std::string& expected_kind) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::missing_file, "cannot open model checkpoint: " + path);
    json obj;
    try {
        in >> obj;
    } catch (const json::exception& e) {
        throw Error(Errc::parse, "model checkpoint " + path + ": " + e.what());
    }
    if (obj.value("format", "") != "lifisim-model") {
        throw Error(Errc::parse, "model checkpoint " + path + ": unknown format tag");
    }
    if (obj.value("kind", "") != expected_kind) {
        throw Error(Errc::parse, "model checkpoint " + path + ": expected kind '" + expected_kind +
                                     "', found '" + obj.value("kind", "") + "'");
    }
    return obj;
}

} // namespace

void save_cdrn(const std::string& path, const CdrnModel& model) {
    json obj;
    obj["format"] = "lifisim-model";
    obj["version"] = 1;
    obj["kind"] = "cdrn";
    obj["config"] = {{"blocks", model.cfg_.blocks},
                     {"layers_per_block", model.cfg_.layers_per_block},
                     {"filters", model.cfg_.filters},
                     {"kernel", model.cfg_.kernel},
                     {"learning_rate", model.cfg_.learning_rate},
                     {"epochs", model.cfg_.epochs},
                     {"batch_size", model.cfg_.batch_size},
                     {"seed", model.cfg_.seed}};
    obj["input_scale"] = model.input_scale;
    json blocks = json::array();
    for (const auto& block : model.blocks_) {
        json layers = json::array();
        for (std::size_t l = 0; l < block.convs.size(); ++l) {
            layers.push_back(conv_to_json(block.convs[l]));
            if (l < block.bns.size()) layers.push_back(bn_to_json(block.bns[l]));
        }
        blocks.push_back(std::move(layers));
    }
    obj["blocks"] = std::move(blocks);
    io::atomic_write(path, obj.dump(2) + "\n");
}

CdrnModel load_cdrn(const std::string& path) {
    const json obj = load_checkpoint_json(path, "cdrn");
    CdrnModel model;
    const json& c = obj.at("config");
    model.cfg_.blocks = c.at("blocks").get<int>();
    model.cfg_.layers_per_block = c.at("layers_per_block").get<int>();
    model.cfg_.filters = c.at("filters").get<int>();
    model.cfg_.kernel = c.at("kernel").get<int>();
    model.cfg_.learning_rate = c.at("learning_rate").get<double>();
    model.cfg_.epochs = c.at("epochs").get<int>();
    model.cfg_.batch_size = c.at("batch_size").get<int>();
    model.cfg_.seed = c.at("seed").get<std::uint64_t>();
    model.input_scale = obj.at("input_scale").get<double>();

    rng::Generator gen(0);
    for (const auto& layers : obj.at("blocks")) {
        CdrnModel::Block block;
        for (const auto& layer : layers) {
            const std::string type = layer.at("type").get<std::string>();
            if (type == "conv2d") {
                block.convs.push_back(conv_from_json(layer, gen));
            } else if (type == "batchnorm2d") {
                block.bns.push_back(bn_from_json(layer));
            } else {
                throw Error(Errc::parse, "model checkpoint: unknown layer type '" + type + "'");
            }
        }
        model.blocks_.push_back(std::move(block));
    }
    return model;
}

void save_tracker(const std::string& path, const TrackerModel& model) {
    json obj;
    obj["format"] = "lifisim-model";
    obj["version"] = 1;
    obj["kind"] = model.kind == TrackerKind::lstm ? "lstm" : "rnn";
    obj["config"] = {{"hidden", model.cfg.hidden},
                     {"window", model.cfg.window},
                     {"learning_rate", model.cfg.learning_rate},
                     {"iterations", model.cfg.iterations},
                     {"train_fraction", model.cfg.train_fraction},
                     {"norm_lo", model.cfg.norm_lo},
                     {"norm_hi", model.cfg.norm_hi},
                     {"seed", model.cfg.seed},
                     {"shared_gate_weights", model.cfg.shared_gate_weights}};
    obj["data_min"] = model.data_min;
    obj["data_max"] = model.data_max;
    if (model.kind == TrackerKind::lstm) {
        obj["gates"] = {{"forget", gate_to_json(model.lstm.forget)},
                        {"cell", gate_to_json(model.lstm.cell)},
                        {"input", gate_to_json(model.lstm.input)},
                        {"output", gate_to_json(model.lstm.output)}};
    } else {
        obj["gates"] = {{"cell", gate_to_json(model.rnn.cell)}};
    }
    obj["readout"] = {{"w", mat_to_json(model.readout.w)}, {"b", vec_to_json(model.readout.b)}};
    io::atomic_write(path, obj.dump(2) + "\n");
}

TrackerModel load_tracker(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw Error(Errc::missing_file, "cannot open model checkpoint: " + path);
    json header;
    try {
        probe >> header;
    } catch (const json::exception& e) {
        throw Error(Errc::parse, "model checkpoint " + path + ": " + e.what());
    }
    const std::string kind = header.value("kind", "");
    if (kind != "lstm" && kind != "rnn") {
        throw Error(Errc::parse, "model checkpoint " + path + ": not a tracker model");
    }
    const json obj = load_checkpoint_json(path, kind);

    TrackerModel model;
    model.kind = kind == "lstm" ? TrackerKind::lstm : TrackerKind::rnn;
    const json& c = obj.at("config");
    model.cfg.hidden = c.at("hidden").get<int>();
    model.cfg.window = c.at("window").get<int>();
    model.cfg.learning_rate = c.at("learning_rate").get<double>();
    model.cfg.iterations = c.at("iterations").get<int>();
    model.cfg.train_fraction = c.at("train_fraction").get<double>();
    model.cfg.norm_lo = c.at("norm_lo").get<double>();
    model.cfg.norm_hi = c.at("norm_hi").get<double>();
    model.cfg.seed = c.at("seed").get<std::uint64_t>();
    model.cfg.shared_gate_weights = c.at("shared_gate_weights").get<bool>();
    model.data_min = obj.at("data_min").get<double>();
    model.data_max = obj.at("data_max").get<double>();

    if (model.kind == TrackerKind::lstm) {
        model.lstm.hidden = model.cfg.hidden;
        model.lstm.shared_gate_weights = model.cfg.shared_gate_weights;
        model.lstm.forget = gate_from_json(obj.at("gates").at("forget"));
        model.lstm.cell = gate_from_json(obj.at("gates").at("cell"));
        model.lstm.input = gate_from_json(obj.at("gates").at("input"));
        model.lstm.output = gate_from_json(obj.at("gates").at("output"));
    } else {
        model.rnn.hidden = model.cfg.hidden;
        model.rnn.cell = gate_from_json(obj.at("gates").at("cell"));
    }
    model.readout.w = mat_from_json(obj.at("readout").at("w"));
    model.readout.b = vec_from_json(obj.at("readout").at("b"));
    return model;
}

} // namespace lifi::neural
