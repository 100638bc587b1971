#include "morphgrad/policy_net.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "morphgrad/errors.hpp"

namespace morphgrad {

void NetworkShape::validate() const {
  require(input_dim >= 1, "network input_dim must be >= 1");
  require(output_dim >= 1, "network output_dim must be >= 1");
  for (std::size_t h : hidden_dims) require(h >= 1, "hidden layer size must be >= 1");
}

std::size_t NetworkShape::layer_in(std::size_t i) const {
  return i == 0 ? input_dim : hidden_dims[i - 1];
}

std::size_t NetworkShape::layer_out(std::size_t i) const {
  return i < hidden_dims.size() ? hidden_dims[i] : output_dim;
}

std::string NetworkShape::to_string() const {
  std::ostringstream os;
  os << input_dim;
  for (std::size_t h : hidden_dims) os << '-' << h;
  os << '-' << output_dim;
  return os.str();
}

NetworkShape NetworkShape::parse(const std::string& text) {
  std::vector<std::size_t> dims;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dash = text.find('-', pos);
    std::string tok = text.substr(pos, dash == std::string::npos ? std::string::npos : dash - pos);
    require(!tok.empty() && tok.find_first_not_of("0123456789") == std::string::npos,
            "bad network shape '" + text + "' (expected e.g. 8-16-16-2)");
    dims.push_back(static_cast<std::size_t>(std::stoul(tok)));
    if (dash == std::string::npos) break;
    pos = dash + 1;
  }
  require(dims.size() >= 2, "network shape needs at least input and output: '" + text + "'");
  NetworkShape shape;
  shape.input_dim = dims.front();
  shape.output_dim = dims.back();
  shape.hidden_dims.assign(dims.begin() + 1, dims.end() - 1);
  shape.validate();
  return shape;
}

std::size_t parameter_count(const NetworkShape& shape) {
  shape.validate();
  std::size_t total = 0;
  for (std::size_t i = 0; i < shape.num_layers(); ++i)
    total += (shape.layer_in(i) + 1) * shape.layer_out(i);
  return total;
}

std::vector<LayerView> unpack(const NetworkShape& shape, std::span<const double> flat) {
  require(flat.size() == parameter_count(shape),
          "weight vector length " + std::to_string(flat.size()) + " != parameter_count " +
              std::to_string(parameter_count(shape)));
  std::vector<LayerView> layers;
  layers.reserve(shape.num_layers());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < shape.num_layers(); ++i) {
    LayerView v;
    v.in = shape.layer_in(i);
    v.out = shape.layer_out(i);
    v.weights = flat.subspan(offset, v.in * v.out);
    offset += v.in * v.out;
    v.bias = flat.subspan(offset, v.out);
    offset += v.out;
    layers.push_back(v);
  }
  return layers;
}

std::vector<double> pack(std::span<const LayerView> layers) {
  std::vector<double> flat;
  for (const LayerView& v : layers) {
    flat.insert(flat.end(), v.weights.begin(), v.weights.end());
    flat.insert(flat.end(), v.bias.begin(), v.bias.end());
  }
  return flat;
}

namespace {

// out = tanh(W x + b), W row-major out x in.
void dense_tanh(const double* w, const double* b, std::size_t in, std::size_t out,
                const double* x, double* y) {
  for (std::size_t r = 0; r < out; ++r) {
    const double* row = w + r * in;
    double acc = b[r];
    for (std::size_t c = 0; c < in; ++c) acc += row[c] * x[c];
    y[r] = std::tanh(acc);
  }
}

}  // namespace

std::vector<double> forward(const NetworkShape& shape, std::span<const double> weights,
                            std::span<const double> obs) {
  require(obs.size() == shape.input_dim,
          "observation length " + std::to_string(obs.size()) + " != input_dim " +
              std::to_string(shape.input_dim));
  MlpPolicy policy(shape, weights);
  std::vector<double> action(shape.output_dim);
  policy(obs, action);
  return action;
}

MlpPolicy::MlpPolicy(NetworkShape shape, std::span<const double> weights)
    : shape_(std::move(shape)), weights_(weights) {
  require(weights_.size() == parameter_count(shape_),
          "weight vector length " + std::to_string(weights_.size()) + " != parameter_count " +
              std::to_string(parameter_count(shape_)));
  std::size_t widest = shape_.input_dim;
  for (std::size_t i = 0; i < shape_.num_layers(); ++i) widest = std::max(widest, shape_.layer_out(i));
  buf_a_.resize(widest);
  buf_b_.resize(widest);
}

void MlpPolicy::operator()(std::span<const double> obs, std::span<double> action) {
  require(obs.size() == shape_.input_dim && action.size() == shape_.output_dim,
          "policy called with wrong observation/action size");
  std::copy(obs.begin(), obs.end(), buf_a_.begin());
  const double* w = weights_.data();
  double* x = buf_a_.data();
  double* y = buf_b_.data();
  for (std::size_t i = 0; i < shape_.num_layers(); ++i) {
    const std::size_t in = shape_.layer_in(i), out = shape_.layer_out(i);
    dense_tanh(w, w + in * out, in, out, x, y);
    w += (in + 1) * out;
    std::swap(x, y);
  }
  std::copy(x, x + shape_.output_dim, action.begin());
}

}  // namespace morphgrad
