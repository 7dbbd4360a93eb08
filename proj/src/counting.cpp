// Copyright (c) 2026 PPTK contributors. All rights reserved.
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

#include "pptk/counting.hpp"

#include <nlohmann/json.hpp>

namespace pptk {

namespace {

// Per-element cost estimates for non-MAC work.
uint64_t act_cost(ActKind k) {
  switch (k) {
    case ActKind::Mish:
    case ActKind::Silu: return 5;
    case ActKind::Sigmoid: return 4;
    case ActKind::LeakyRelu: return 2;
    case ActKind::Relu: return 1;
    case ActKind::Linear: return 0;
  }
  return 0;
}

NodeCost conv_cost(const ConvAttrs& c, const ShapeNCHW& out, int64_t extra_in_ch) {
  NodeCost cost;
  int64_t in_ch = c.in_ch + extra_in_ch;
  cost.params = in_ch / c.groups * c.out_ch * c.kernel * c.kernel +
                (c.bias ? c.out_ch : 0);
  uint64_t out_elems = uint64_t(out.numel());
  cost.macs = out_elems * uint64_t(in_ch / c.groups * c.kernel * c.kernel);
  if (c.bias) cost.bias_adds = out_elems;
  return cost;
}

}  // namespace

NodeCost node_cost(const LayerSpec& node, const ShapeNCHW& out,
                   const std::vector<ShapeNCHW>& in) {
  NodeCost cost;
  switch (node.kind()) {
    case LayerKind::Conv2d:
      cost = conv_cost(std::get<ConvAttrs>(node.attrs), out, 0);
      break;
    case LayerKind::CoordConv:
      cost = conv_cost(std::get<CoordConvAttrs>(node.attrs).conv, out, 2);
      cost.elementwise += uint64_t(2 * in[0].n * in[0].h * in[0].w);  // coord fill
      break;
    case LayerKind::DeformConv2d: {
      const ConvAttrs& c = std::get<DeformConvAttrs>(node.attrs).conv;
      cost = conv_cost(c, out, 0);
      // offset-predicting conv: 2*k^2 output channels, same geometry, bias
      int64_t off_ch = 2 * c.kernel * c.kernel;
      cost.params += c.in_ch * off_ch * c.kernel * c.kernel + off_ch;
      uint64_t off_elems = uint64_t(out.n * off_ch * out.h * out.w);
      cost.macs += off_elems * uint64_t(c.in_ch * c.kernel * c.kernel);
      cost.bias_adds += off_elems;
      // bilinear sampling: one fractional read per (position, in channel, tap)
      cost.elementwise +=
          uint64_t(out.n * out.h * out.w * c.in_ch * c.kernel * c.kernel) * 8;
      break;
    }
    case LayerKind::BatchNorm: {
      int64_t ch = std::get<BatchNormAttrs>(node.attrs).channels;
      cost.params = 2 * ch;
      cost.bn_running = 2 * ch;
      cost.elementwise = uint64_t(out.numel()) * 2;
      break;
    }
    case LayerKind::Activation:
      cost.elementwise =
          uint64_t(out.numel()) * act_cost(std::get<ActivationAttrs>(node.attrs).kind);
      break;
    case LayerKind::UpsampleNearest2x:
    case LayerKind::Add:
      cost.elementwise = uint64_t(out.numel());
      break;
    case LayerKind::Concat:
    case LayerKind::DropBlock:
      break;  // copies / inference identity
    case LayerKind::MaxPool: {
      const auto& p = std::get<MaxPoolAttrs>(node.attrs);
      cost.elementwise = uint64_t(out.numel()) * uint64_t(p.kernel * p.kernel);
      break;
    }
    case LayerKind::AvgPool: {
      const auto& p = std::get<AvgPoolAttrs>(node.attrs);
      cost.elementwise = uint64_t(out.numel()) * uint64_t(p.kernel * p.kernel);
      break;
    }
    case LayerKind::SPP: {
      uint64_t in_elems = uint64_t(in[0].numel());
      for (int64_t k : std::get<SppAttrs>(node.attrs).pool_sizes)
        cost.elementwise += in_elems * uint64_t(k * k);
      break;
    }
  }
  return cost;
}

int64_t count_params(const GraphSpec& graph, bool trainable_only) {
  graph.validate();
  int64_t total = 0;
  ShapeNCHW dummy;
  std::vector<ShapeNCHW> no_inputs{dummy};
  for (const auto& node : graph.nodes) {
    if (trainable_only && graph.node_frozen(node)) continue;
    total += node_cost(node, dummy, no_inputs).params;
  }
  return total;
}

uint64_t count_flops(const GraphSpec& graph, const ShapeMap& entry_shapes) {
  ArchReport r = analyze_graph(graph, entry_shapes);
  return r.flops_x2;
}

uint64_t count_flops(const GraphSpec& graph, const ShapeNCHW& entry) {
  check(graph.inputs.size() == 1,
        "graph has multiple entries; pass a shape per entry");
  ShapeMap m{{graph.inputs[0].name, entry}};
  return count_flops(graph, m);
}

ArchReport analyze_graph(const GraphSpec& graph, const ShapeMap& entry_shapes) {
  ShapeMap shapes = infer_shapes(graph, entry_shapes);
  ArchReport report;
  for (const auto& node : graph.nodes) {
    std::vector<ShapeNCHW> in;
    for (const auto& name : node.inputs) in.push_back(shapes.at(name));
    const ShapeNCHW& out = shapes.at(node.name);
    NodeCost cost = node_cost(node, out, in);

    uint64_t flops = 2 * cost.macs + cost.bias_adds + cost.elementwise;
    report.total_params += cost.params;
    if (!graph.node_frozen(node)) report.trainable_params += cost.params;
    report.bn_running_stats += cost.bn_running;
    report.macs += cost.macs + cost.bias_adds;
    report.flops_x2 += flops;
    report.per_node.push_back({node.name, kind_name(node.kind()), out,
                               cost.params, flops, cost.macs});
  }
  report.gflops = double(report.macs) / 1e9;
  return report;
}

ArchReport analyze_graph(const GraphSpec& graph, const ShapeNCHW& entry) {
  check(graph.inputs.size() == 1,
        "graph has multiple entries; pass a shape per entry");
  ShapeMap m{{graph.inputs[0].name, entry}};
  return analyze_graph(graph, m);
}

std::string report_to_json(const ArchReport& report, bool per_node) {
  nlohmann::ordered_json j;
  j["total_params"] = report.total_params;
  j["trainable_params"] = report.trainable_params;
  j["gflops"] = report.gflops;
  j["bn_running_stats"] = report.bn_running_stats;
  j["macs"] = report.macs;
  j["flops_multiply_add_x2"] = report.flops_x2;
  if (per_node) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : report.per_node) {
      nodes.push_back({{"name", n.name},
                       {"kind", n.kind},
                       {"out_shape", {n.out_shape.n, n.out_shape.c, n.out_shape.h, n.out_shape.w}},
                       {"params", n.params},
                       {"flops", n.flops}});
    }
    j["per_node"] = std::move(nodes);
  }
  return j.dump(2);
}

}  // namespace pptk
