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

#include "pptk/ppyolov2.hpp"

namespace pptk {

namespace {

// Thin wrapper collecting nodes; all helpers return the name of the node
// that carries the block's output.
class Builder {
 public:
  explicit Builder(GraphSpec& g) : g_(g) {}

  std::string conv(const std::string& name, const std::string& input,
                   ConvAttrs attrs, int stage = -1, bool coordconv = false,
                   bool deform = false) {
    LayerSpec node;
    node.name = name;
    node.inputs = {input};
    node.stage = stage;
    if (deform)
      node.attrs = DeformConvAttrs{attrs};
    else if (coordconv)
      node.attrs = CoordConvAttrs{attrs};
    else
      node.attrs = attrs;
    g_.nodes.push_back(std::move(node));
    return name;
  }

  std::string bn(const std::string& name, const std::string& input,
                 int64_t channels, int stage = -1) {
    g_.nodes.push_back({name, {input}, BatchNormAttrs{channels}, stage});
    return name;
  }

  std::string act(const std::string& name, const std::string& input,
                  ActKind kind, int stage = -1) {
    g_.nodes.push_back({name, {input}, ActivationAttrs{kind, 0.1}, stage});
    return name;
  }

  // conv + BN + activation; linear activation skips the act node
  std::string cba(const std::string& base, const std::string& input,
                  int64_t in_ch, int64_t out_ch, int64_t kernel, int64_t stride,
                  ActKind kind, int stage = -1, bool coordconv = false,
                  bool deform = false) {
    ConvAttrs attrs{in_ch, out_ch, kernel, stride, kernel / 2, 1, false};
    std::string out = conv(base + ".conv", input, attrs, stage, coordconv, deform);
    out = bn(base + ".bn", out, out_ch, stage);
    if (kind != ActKind::Linear) out = act(base + ".act", out, kind, stage);
    return out;
  }

  std::string add(const std::string& name, std::vector<std::string> inputs,
                  int stage = -1) {
    g_.nodes.push_back({name, std::move(inputs), AddAttrs{}, stage});
    return name;
  }

  std::string concat(const std::string& name, std::vector<std::string> inputs,
                     int stage = -1) {
    g_.nodes.push_back({name, std::move(inputs), ConcatAttrs{}, stage});
    return name;
  }

  std::string maxpool(const std::string& name, const std::string& input,
                      int64_t k, int64_t s, int64_t p, int stage = -1) {
    g_.nodes.push_back({name, {input}, MaxPoolAttrs{k, s, p}, stage});
    return name;
  }

  std::string avgpool(const std::string& name, const std::string& input,
                      int64_t k, int64_t s, int64_t p, int stage = -1) {
    g_.nodes.push_back({name, {input}, AvgPoolAttrs{k, s, p}, stage});
    return name;
  }

  std::string spp(const std::string& name, const std::string& input,
                  int stage = -1) {
    g_.nodes.push_back({name, {input}, SppAttrs{}, stage});
    return name;
  }

  std::string dropblock(const std::string& name, const std::string& input,
                        int64_t block_size, double keep_prob, int stage = -1) {
    g_.nodes.push_back({name, {input}, DropBlockAttrs{block_size, keep_prob}, stage});
    return name;
  }

  std::string upsample(const std::string& name, const std::string& input,
                       int stage = -1) {
    g_.nodes.push_back({name, {input}, UpsampleNearest2xAttrs{}, stage});
    return name;
  }

 private:
  GraphSpec& g_;
};

}  // namespace

GraphSpec build_backbone_resnet50vd(bool dcn_in_stage5) {
  GraphSpec g;
  g.inputs = {{"image", 3}};
  Builder b(g);

  // deep stem: 3x3/2 -> 3x3 -> 3x3, then 3x3/2 max pool
  std::string x = b.cba("bb.stem.1", "image", 3, 32, 3, 2, ActKind::Relu, 0);
  x = b.cba("bb.stem.2", x, 32, 32, 3, 1, ActKind::Relu, 0);
  x = b.cba("bb.stem.3", x, 32, 64, 3, 1, ActKind::Relu, 0);
  x = b.maxpool("bb.stem.pool", x, 3, 2, 1, 0);

  const int64_t widths[4] = {64, 128, 256, 512};
  const int64_t outs[4] = {256, 512, 1024, 2048};
  const int blocks[4] = {3, 4, 6, 3};
  std::string c3, c4, c5;

  int64_t in_ch = 64;
  for (int s = 0; s < 4; ++s) {
    int stage = s + 1;
    int64_t w = widths[s];
    int64_t out_ch = outs[s];
    bool deform = dcn_in_stage5 && s == 3;
    for (int blk = 0; blk < blocks[s]; ++blk) {
      std::string base = "bb.res" + std::to_string(s + 2) + "." + std::to_string(blk);
      bool first = blk == 0;
      int64_t stride = (first && s > 0) ? 2 : 1;
      std::string residual =
          b.cba(base + ".1", x, first ? in_ch : out_ch, w, 1, 1, ActKind::Relu, stage);
      residual = b.cba(base + ".2", residual, w, w, 3, stride, ActKind::Relu,
                       stage, false, deform);
      residual = b.cba(base + ".3", residual, w, out_ch, 1, 1, ActKind::Linear, stage);

      std::string shortcut = x;
      if (first) {
        std::string sc = x;
        if (stride == 2) sc = b.avgpool(base + ".sc.pool", sc, 2, 2, 0, stage);
        shortcut = b.cba(base + ".sc", sc, in_ch, out_ch, 1, 1, ActKind::Linear, stage);
      }
      x = b.add(base + ".sum", {residual, shortcut}, stage);
      x = b.act(base + ".out", x, ActKind::Relu, stage);
    }
    in_ch = out_ch;
    if (s == 1) c3 = x;
    if (s == 2) c4 = x;
    if (s == 3) c5 = x;
  }

  g.outputs = {c3, c4, c5};
  return g;
}

namespace {

// 1x1 -> 3x3 (width doubling) -> 1x1, the repeating neck unit. `deep` adds a
// second 3x3/1x1 pair (used only at the p5 stage, around the SPP).
struct NeckStage {
  Builder& b;
  const NeckOptions& opts;

  std::string block(const std::string& base, std::string x, int64_t in_ch,
                    int64_t width, bool with_spp, bool coord) {
    x = b.cba(base + ".1", x, in_ch, width, 1, 1, opts.act, -1,
              coord && opts.coordconv);
    x = b.cba(base + ".2", x, width, 2 * width, 3, 1, opts.act);
    if (opts.dropblock)
      x = b.dropblock(base + ".drop", x, opts.dropblock_size, opts.keep_prob);
    x = b.cba(base + ".3", x, 2 * width, width, 1, 1, opts.act);
    if (with_spp) {
      x = b.spp(base + ".spp", x);
      x = b.cba(base + ".4", x, 4 * width, width, 1, 1, opts.act);
      x = b.cba(base + ".5", x, width, 2 * width, 3, 1, opts.act);
      x = b.cba(base + ".6", x, 2 * width, width, 1, 1, opts.act);
    }
    return x;
  }
};

}  // namespace

GraphSpec build_pan_neck(int64_t c3_ch, int64_t c4_ch, int64_t c5_ch,
                         const NeckOptions& opts) {
  check(c3_ch > 0 && c4_ch > 0 && c5_ch > 0, "neck: channel counts must be > 0");
  GraphSpec g;
  g.inputs = {{"c3", c3_ch}, {"c4", c4_ch}, {"c5", c5_ch}};
  Builder b(g);
  NeckStage stage{b, opts};

  std::string p5 = stage.block("fpn.p5", "c5", c5_ch, 512, opts.spp, true);
  std::string route5 = b.cba("fpn.route5", p5, 512, 256, 1, 1, opts.act);
  std::string up5 = b.upsample("fpn.up5", route5);
  std::string cat4 = b.concat("fpn.cat4", {up5, "c4"});
  std::string p4 = stage.block("fpn.p4", cat4, 256 + c4_ch, 256, false, true);

  std::string route4 = b.cba("fpn.route4", p4, 256, 128, 1, 1, opts.act);
  std::string up4 = b.upsample("fpn.up4", route4);
  std::string cat3 = b.concat("fpn.cat3", {up4, "c3"});
  std::string p3 = stage.block("fpn.p3", cat3, 128 + c3_ch, 128, false, true);

  if (!opts.pan) {
    g.outputs = {p3, p4, p5};
    return g;
  }

  // bottom-up path; each level gets an identity skip from the FPN output
  std::string n3 = p3;
  std::string down3 = b.cba("pan.down3", n3, 128, 256, 3, 2, opts.act);
  std::string pcat4 = b.concat("pan.cat4", {down3, p4});
  std::string n4 = stage.block("pan.n4", pcat4, 512, 256, false, false);
  n4 = b.add("pan.n4.skip", {n4, p4});

  std::string down4 = b.cba("pan.down4", n4, 256, 512, 3, 2, opts.act);
  std::string pcat5 = b.concat("pan.cat5", {down4, p5});
  std::string n5 = stage.block("pan.n5", pcat5, 1024, 512, false, false);
  n5 = b.add("pan.n5.skip", {n5, p5});

  g.outputs = {n3, n4, n5};
  return g;
}

int64_t head_out_channels(int64_t num_classes, int64_t anchors_per_level,
                          bool iou_aware) {
  return anchors_per_level * (5 + num_classes + (iou_aware ? 1 : 0));
}

GraphSpec build_head(int64_t num_classes, int64_t anchors_per_level,
                     bool iou_aware, const HeadOptions& opts) {
  check(num_classes >= 1, "head: num_classes must be >= 1");
  check(anchors_per_level >= 1, "head: anchors_per_level must be >= 1");
  check(opts.in_channels.size() == 3, "head: expects three input levels");

  GraphSpec g;
  Builder b(g);
  int64_t out_ch = head_out_channels(num_classes, anchors_per_level, iou_aware);
  for (int i = 0; i < 3; ++i) {
    int64_t in_ch = opts.in_channels[size_t(i)];
    std::string level = "l" + std::to_string(i + 3);
    g.inputs.push_back({"n" + std::to_string(i + 3), in_ch});
    std::string x = b.cba("head." + level + ".stem", "n" + std::to_string(i + 3),
                          in_ch, 2 * in_ch, 3, 1, opts.act, -1, opts.coordconv);
    x = b.conv("head." + level + ".out", x,
               ConvAttrs{2 * in_ch, out_ch, 1, 1, 0, 1, true});
    g.outputs.push_back(x);
  }
  return g;
}

Variant variant_from_name(const std::string& name) {
  if (name.size() == 1) {
    switch (name[0]) {
      case 'A': case 'a': return Variant::A;
      case 'B': case 'b': return Variant::B;
      case 'C': case 'c': return Variant::C;
      case 'D': case 'd': return Variant::D;
      case 'E': case 'e': return Variant::E;
    }
  }
  throw ValidationError("unknown variant: '" + name + "' (expected A..E)");
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::A: return "A";
    case Variant::B: return "B";
    case Variant::C: return "C";
    case Variant::D: return "D";
    case Variant::E: return "E";
  }
  return "?";
}

NeckOptions ModelConfig::neck_options() const {
  NeckOptions opts;
  if (variant == Variant::A) {
    opts.pan = false;
    opts.act = ActKind::LeakyRelu;
  }
  if (neck_act_override != ActKind::Linear) opts.act = neck_act_override;
  return opts;
}

int64_t ModelConfig::default_input_size() const {
  return (variant == Variant::A || variant == Variant::B) ? 608 : 640;
}

bool ModelConfig::large_size_list() const {
  return variant == Variant::D || variant == Variant::E;
}

bool ModelConfig::soft_label_iou_loss() const { return variant == Variant::E; }

GraphSpec build_ppyolov2(const ModelConfig& config) {
  GraphSpec g = build_backbone_resnet50vd(true);
  std::string c3 = g.outputs[0], c4 = g.outputs[1], c5 = g.outputs[2];

  GraphSpec neck = build_pan_neck(512, 1024, 2048, config.neck_options());
  merge_graphs(g, neck, {{"c3", c3}, {"c4", c4}, {"c5", c5}});

  HeadOptions head_opts;
  GraphSpec head = build_head(config.num_classes, config.anchors_per_level,
                              true, head_opts);
  merge_graphs(g, head, {{"n3", neck.outputs[0]},
                         {"n4", neck.outputs[1]},
                         {"n5", neck.outputs[2]}});

  g.outputs = head.outputs;
  g.frozen_stages = config.frozen_stages;
  g.validate();
  return g;
}

}  // namespace pptk
