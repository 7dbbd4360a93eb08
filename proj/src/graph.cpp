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

#include "pptk/graph.hpp"

#include <set>
#include <sstream>

namespace pptk {

std::string ShapeNCHW::str() const {
  std::ostringstream os;
  os << n << "x" << c << "x" << h << "x" << w;
  return os.str();
}

const char* act_name(ActKind k) {
  switch (k) {
    case ActKind::Mish: return "mish";
    case ActKind::Silu: return "silu";
    case ActKind::LeakyRelu: return "leaky_relu";
    case ActKind::Sigmoid: return "sigmoid";
    case ActKind::Relu: return "relu";
    case ActKind::Linear: return "linear";
  }
  return "?";
}

ActKind act_from_name(const std::string& name) {
  if (name == "mish") return ActKind::Mish;
  if (name == "silu") return ActKind::Silu;
  if (name == "leaky_relu") return ActKind::LeakyRelu;
  if (name == "sigmoid") return ActKind::Sigmoid;
  if (name == "relu") return ActKind::Relu;
  if (name == "linear") return ActKind::Linear;
  throw ValidationError("unknown activation: " + name);
}

const char* kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Conv2d: return "Conv2d";
    case LayerKind::DeformConv2d: return "DeformConv2d";
    case LayerKind::CoordConv: return "CoordConv";
    case LayerKind::BatchNorm: return "BatchNorm";
    case LayerKind::Activation: return "Activation";
    case LayerKind::UpsampleNearest2x: return "UpsampleNearest2x";
    case LayerKind::Concat: return "Concat";
    case LayerKind::Add: return "Add";
    case LayerKind::MaxPool: return "MaxPool";
    case LayerKind::AvgPool: return "AvgPool";
    case LayerKind::SPP: return "SPP";
    case LayerKind::DropBlock: return "DropBlock";
  }
  return "?";
}

LayerKind LayerSpec::kind() const {
  return LayerKind(attrs.index());
}

namespace {

void validate_conv(const ConvAttrs& c, const std::string& name) {
  check(c.in_ch >= 1 && c.out_ch >= 1, name + ": channel counts must be >= 1");
  check(c.kernel >= 1 && c.stride >= 1 && c.pad >= 0, name + ": bad geometry");
  check(c.groups >= 1 && c.in_ch % c.groups == 0 && c.out_ch % c.groups == 0,
        name + ": groups must divide in_ch and out_ch");
}

}  // namespace

void GraphSpec::validate() const {
  std::set<std::string> seen;
  for (const auto& e : inputs) {
    check(e.channels >= 1, "entry " + e.name + ": channels must be >= 1");
    check(seen.insert(e.name).second, "duplicate entry name: " + e.name);
  }
  for (const auto& node : nodes) {
    check(!node.name.empty(), "node with empty name");
    check(!node.inputs.empty(), node.name + ": no inputs");
    for (const auto& in : node.inputs)
      check(seen.count(in) > 0,
            node.name + ": input '" + in + "' is not a prior node or entry");
    check(seen.insert(node.name).second, "duplicate node name: " + node.name);
    switch (node.kind()) {
      case LayerKind::Conv2d:
        validate_conv(std::get<ConvAttrs>(node.attrs), node.name);
        break;
      case LayerKind::DeformConv2d: {
        const auto& d = std::get<DeformConvAttrs>(node.attrs);
        validate_conv(d.conv, node.name);
        check(d.conv.groups == 1, node.name + ": grouped deform conv unsupported");
        break;
      }
      case LayerKind::CoordConv:
        validate_conv(std::get<CoordConvAttrs>(node.attrs).conv, node.name);
        break;
      case LayerKind::BatchNorm:
        check(std::get<BatchNormAttrs>(node.attrs).channels >= 1,
              node.name + ": channels must be >= 1");
        break;
      case LayerKind::Concat:
      case LayerKind::Add:
        check(node.inputs.size() >= 2, node.name + ": needs at least 2 inputs");
        break;
      case LayerKind::SPP:
        check(!std::get<SppAttrs>(node.attrs).pool_sizes.empty(),
              node.name + ": empty pool size list");
        break;
      case LayerKind::DropBlock: {
        const auto& d = std::get<DropBlockAttrs>(node.attrs);
        check(d.block_size >= 1 && d.block_size % 2 == 1,
              node.name + ": block_size must be odd and >= 1");
        check(d.keep_prob > 0.0 && d.keep_prob <= 1.0,
              node.name + ": keep_prob must be in (0,1]");
        break;
      }
      default:
        break;
    }
  }
  for (const auto& out : outputs)
    check(seen.count(out) > 0, "output '" + out + "' does not resolve");
}

const LayerSpec* GraphSpec::find(const std::string& name) const {
  for (const auto& node : nodes)
    if (node.name == name) return &node;
  return nullptr;
}

void merge_graphs(GraphSpec& dst, const GraphSpec& src,
                  const std::map<std::string, std::string>& wiring) {
  for (const auto& e : src.inputs)
    check(wiring.count(e.name) > 0, "merge: entry '" + e.name + "' not wired");
  for (const auto& node : src.nodes) {
    check(dst.find(node.name) == nullptr, "merge: name collision: " + node.name);
    LayerSpec copy = node;
    for (auto& in : copy.inputs) {
      auto it = wiring.find(in);
      if (it != wiring.end() && src.find(in) == nullptr) in = it->second;
    }
    dst.nodes.push_back(std::move(copy));
  }
}

namespace {

int64_t conv_extent(int64_t in, int64_t kernel, int64_t stride, int64_t pad,
                    const std::string& name) {
  int64_t out = (in + 2 * pad - kernel) / stride + 1;
  check(in + 2 * pad >= kernel, name + ": kernel larger than padded input");
  check(out >= 1, name + ": output extent < 1");
  return out;
}

ShapeNCHW conv_shape(const ShapeNCHW& in, const ConvAttrs& c,
                     const std::string& name) {
  check(in.c == c.in_ch, name + ": expected " + std::to_string(c.in_ch) +
                             " input channels, got " + std::to_string(in.c));
  ShapeNCHW out = in;
  out.c = c.out_ch;
  out.h = conv_extent(in.h, c.kernel, c.stride, c.pad, name);
  out.w = conv_extent(in.w, c.kernel, c.stride, c.pad, name);
  return out;
}

ShapeNCHW pool_shape(const ShapeNCHW& in, int64_t k, int64_t s, int64_t p,
                     const std::string& name) {
  ShapeNCHW out = in;
  out.h = conv_extent(in.h, k, s, p, name);
  out.w = conv_extent(in.w, k, s, p, name);
  return out;
}

}  // namespace

ShapeMap infer_shapes(const GraphSpec& graph, const ShapeMap& entry_shapes) {
  graph.validate();
  ShapeMap shapes;
  for (const auto& e : graph.inputs) {
    auto it = entry_shapes.find(e.name);
    check(it != entry_shapes.end(), "no shape given for entry " + e.name);
    const ShapeNCHW& s = it->second;
    check(s.n >= 1 && s.c >= 1 && s.h >= 1 && s.w >= 1,
          "entry " + e.name + ": all extents must be >= 1");
    check(s.c == e.channels, "entry " + e.name + ": expected " +
                                 std::to_string(e.channels) + " channels");
    shapes[e.name] = s;
  }

  for (const auto& node : graph.nodes) {
    std::vector<ShapeNCHW> in;
    in.reserve(node.inputs.size());
    for (const auto& name : node.inputs) in.push_back(shapes.at(name));
    ShapeNCHW out = in[0];

    switch (node.kind()) {
      case LayerKind::Conv2d:
        out = conv_shape(in[0], std::get<ConvAttrs>(node.attrs), node.name);
        break;
      case LayerKind::DeformConv2d:
        out = conv_shape(in[0], std::get<DeformConvAttrs>(node.attrs).conv,
                         node.name);
        break;
      case LayerKind::CoordConv: {
        ConvAttrs widened = std::get<CoordConvAttrs>(node.attrs).conv;
        ShapeNCHW padded = in[0];
        check(padded.c == widened.in_ch,
              node.name + ": expected " + std::to_string(widened.in_ch) +
                  " input channels, got " + std::to_string(padded.c));
        padded.c += 2;
        widened.in_ch += 2;
        out = conv_shape(padded, widened, node.name);
        break;
      }
      case LayerKind::BatchNorm:
        check(in[0].c == std::get<BatchNormAttrs>(node.attrs).channels,
              node.name + ": channel mismatch");
        break;
      case LayerKind::Activation:
      case LayerKind::DropBlock:
        break;
      case LayerKind::UpsampleNearest2x:
        out.h *= 2;
        out.w *= 2;
        break;
      case LayerKind::Concat: {
        int64_t c = 0;
        for (const auto& s : in) {
          check(s.n == in[0].n && s.h == in[0].h && s.w == in[0].w,
                node.name + ": concat inputs disagree on n/h/w");
          c += s.c;
        }
        out.c = c;
        break;
      }
      case LayerKind::Add:
        for (const auto& s : in)
          check(s == in[0], node.name + ": add inputs disagree on shape");
        break;
      case LayerKind::MaxPool: {
        const auto& p = std::get<MaxPoolAttrs>(node.attrs);
        out = pool_shape(in[0], p.kernel, p.stride, p.pad, node.name);
        break;
      }
      case LayerKind::AvgPool: {
        const auto& p = std::get<AvgPoolAttrs>(node.attrs);
        out = pool_shape(in[0], p.kernel, p.stride, p.pad, node.name);
        break;
      }
      case LayerKind::SPP:
        // identity + one stride-1 same-pad pool per size
        out.c = in[0].c * int64_t(1 + std::get<SppAttrs>(node.attrs).pool_sizes.size());
        break;
    }
    shapes[node.name] = out;
  }
  return shapes;
}

ShapeMap infer_shapes(const GraphSpec& graph, const ShapeNCHW& entry) {
  check(graph.inputs.size() == 1,
        "graph has multiple entries; pass a shape per entry");
  ShapeMap m;
  m[graph.inputs[0].name] = entry;
  return infer_shapes(graph, m);
}

}  // namespace pptk
