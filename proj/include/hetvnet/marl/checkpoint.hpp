// Copyright 2026 The HetVNET Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetvnet/marl/qnetwork.hpp"

namespace hetvnet::marl {

// Text checkpoint:
//   qnet v1 <L> <d0> <d1> ... <dL>
// then, for each layer, the weights (row-major, d_{l+1} rows by d_l columns)
// followed by the biases, as whitespace-separated decimal tokens.

template <typename Scalar>
void write_checkpoint(std::ostream& out, const QNetwork<Scalar>& net) {
  const auto& dims = net.dims();
  out << "qnet v1 " << net.layers();
  for (int d : dims) out << ' ' << d;
  out << '\n';
  const auto old_precision = out.precision(std::numeric_limits<Scalar>::max_digits10);
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const auto& w = net.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << (c ? " " : "") << w(r, c);
      out << '\n';
    }
    const auto& b = net.bias(l);
    for (Eigen::Index r = 0; r < b.size(); ++r) out << (r ? " " : "") << b(r);
    out << '\n';
  }
  out.precision(old_precision);
}

template <typename Scalar>
QNetwork<Scalar> read_checkpoint(std::istream& in) {
  std::string magic;
  std::string version;
  std::size_t layers = 0;
  if (!(in >> magic >> version >> layers) || magic != "qnet" || version != "v1") {
    throw std::runtime_error("not a qnet v1 checkpoint");
  }
  if (layers == 0 || layers > 64) throw std::runtime_error("implausible layer count in checkpoint");
  std::vector<int> dims(layers + 1);
  for (int& d : dims) {
    if (!(in >> d) || d < 1) throw std::runtime_error("bad layer dimension in checkpoint");
  }
  QNetwork<Scalar> net(dims);
  auto read = [&](Scalar& v) {
    double x = 0.0;
    if (!(in >> x)) throw std::runtime_error("truncated checkpoint");
    v = static_cast<Scalar>(x);
  };
  for (std::size_t l = 0; l < layers; ++l) {
    auto& w = net.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) read(w(r, c));
    }
    auto& b = net.bias(l);
    for (Eigen::Index r = 0; r < b.size(); ++r) read(b(r));
  }
  std::string extra;
  if (in >> extra) throw std::runtime_error("trailing data after checkpoint");
  return net;
}

template <typename Scalar>
std::string to_checkpoint_string(const QNetwork<Scalar>& net) {
  std::ostringstream os;
  write_checkpoint(os, net);
  return os.str();
}

}  // namespace hetvnet::marl
