#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace morphgrad {

// Layer sizes of a fully-connected tanh network.
struct NetworkShape {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_dims;
  std::size_t output_dim = 1;

  // Throws ContractError if any dimension is zero.
  void validate() const;
  std::size_t num_layers() const { return hidden_dims.size() + 1; }
  // (in, out) of layer `i`.
  std::size_t layer_in(std::size_t i) const;
  std::size_t layer_out(std::size_t i) const;

  std::string to_string() const;  // "24-40-40-4"
  static NetworkShape parse(const std::string& text);

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

// Sum over layers of (in + 1) * out.
std::size_t parameter_count(const NetworkShape& shape);

// One layer's slice of a flat weight vector: `weights` is out x in row-major,
// followed by `bias` of length out.
struct LayerView {
  std::size_t in = 0;
  std::size_t out = 0;
  std::span<const double> weights;
  std::span<const double> bias;
};

// Splits a flat weight vector into per-layer views (no copies).
std::vector<LayerView> unpack(const NetworkShape& shape,
                              std::span<const double> flat);
// Inverse of unpack.
std::vector<double> pack(std::span<const LayerView> layers);

// tanh after every layer, including the output.
std::vector<double> forward(const NetworkShape& shape,
                            std::span<const double> weights,
                            std::span<const double> obs);

// Allocation-free evaluator for rollout inner loops. Borrows the weights;
// owns scratch space, so one instance per thread.
class MlpPolicy {
 public:
  MlpPolicy(NetworkShape shape, std::span<const double> weights);

  const NetworkShape& shape() const { return shape_; }
  void operator()(std::span<const double> obs, std::span<double> action);

 private:
  NetworkShape shape_;
  std::span<const double> weights_;
  std::vector<double> buf_a_;
  std::vector<double> buf_b_;
};

}  // namespace morphgrad
