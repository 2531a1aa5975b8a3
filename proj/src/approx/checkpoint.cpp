#include "npm/approx/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace npm::approx {

using nlohmann::json;

namespace {

json flat_weights(const std::vector<Eigen::MatrixXd>& mats) {
  json out = json::array();
  for (const auto& w : mats) {
    json flat = json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    out.push_back(std::move(flat));
  }
  return out;
}

json flat_biases(const std::vector<Eigen::VectorXd>& vecs) {
  json out = json::array();
  for (const auto& b : vecs) out.push_back(std::vector<double>(b.data(), b.data() + b.size()));
  return out;
}

void fill_weights(const json& src, std::vector<Eigen::MatrixXd>& mats) {
  if (src.size() != mats.size()) throw std::invalid_argument("checkpoint: layer count mismatch");
  for (std::size_t l = 0; l < mats.size(); ++l) {
    const auto& flat = src[l];
    if (flat.size() != static_cast<std::size_t>(mats[l].size()))
      throw std::invalid_argument("checkpoint: weight size mismatch");
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < mats[l].rows(); ++r)
      for (Eigen::Index c = 0; c < mats[l].cols(); ++c) mats[l](r, c) = flat[k++].get<double>();
  }
}

void fill_biases(const json& src, std::vector<Eigen::VectorXd>& vecs) {
  if (src.size() != vecs.size()) throw std::invalid_argument("checkpoint: layer count mismatch");
  for (std::size_t l = 0; l < vecs.size(); ++l) {
    if (src[l].size() != static_cast<std::size_t>(vecs[l].size()))
      throw std::invalid_argument("checkpoint: bias size mismatch");
    for (Eigen::Index i = 0; i < vecs[l].size(); ++i) vecs[l](i) = src[l][i].get<double>();
  }
}

}  // namespace

json to_json(const Mlp& net, const AdamState* optimizer) {
  json doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["layer_sizes"] = net.layer_sizes();
  doc["activation"] = to_string(net.activation());
  doc["weights"] = flat_weights(net.weights());
  doc["biases"] = flat_biases(net.biases());
  if (optimizer != nullptr) {
    const auto& cfg = optimizer->config();
    doc["optimizer"] = {
        {"type", "adam"},
        {"step", optimizer->steps()},
        {"learning_rate", cfg.learning_rate},
        {"beta1", cfg.beta1},
        {"beta2", cfg.beta2},
        {"epsilon", cfg.epsilon},
        {"m_weights", flat_weights(optimizer->first_moment().weights)},
        {"m_biases", flat_biases(optimizer->first_moment().biases)},
        {"v_weights", flat_weights(optimizer->second_moment().weights)},
        {"v_biases", flat_biases(optimizer->second_moment().biases)},
    };
  }
  return doc;
}

Mlp mlp_from_json(const json& doc) {
  if (!doc.contains("format_version") || doc.at("format_version").get<int>() != kCheckpointFormatVersion)
    throw std::invalid_argument("checkpoint: unsupported format_version");
  Mlp net(doc.at("layer_sizes").get<std::vector<int>>(),
          parse_activation(doc.at("activation").get<std::string>()));
  fill_weights(doc.at("weights"), net.weights());
  fill_biases(doc.at("biases"), net.biases());
  return net;
}

std::optional<AdamState> adam_from_json(const json& doc, const Mlp& net) {
  if (!doc.contains("optimizer")) return std::nullopt;
  const auto& opt = doc.at("optimizer");
  AdamConfig cfg{opt.at("learning_rate").get<double>(), opt.at("beta1").get<double>(),
                 opt.at("beta2").get<double>(), opt.at("epsilon").get<double>()};
  MlpGradients m = net.zero_gradients();
  MlpGradients v = net.zero_gradients();
  fill_weights(opt.at("m_weights"), m.weights);
  fill_biases(opt.at("m_biases"), m.biases);
  fill_weights(opt.at("v_weights"), v.weights);
  fill_biases(opt.at("v_biases"), v.biases);
  return AdamState(cfg, opt.at("step").get<std::int64_t>(), std::move(m), std::move(v));
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

}  // namespace npm::approx
