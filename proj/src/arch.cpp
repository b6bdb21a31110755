// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/arch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "promptpower/error.hpp"

namespace promptpower {
namespace {

using nlohmann::json;

// Canonical key first, then accepted aliases.
struct KeySpec {
  std::string_view canonical;
  std::vector<std::string_view> aliases;
};

constexpr std::string_view kModelId = "model_id";

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"model_id", {"_name_or_path"}},
      {"num_layers", {"num_hidden_layers", "n_layer", "n_layers", "layers"}},
      {"hidden_size", {"d_model", "n_embd", "hidden"}},
      {"intermediate_size", {"ffn_dim", "n_inner", "intermediate"}},
      {"num_attention_heads", {"n_head", "n_heads", "heads"}},
      {"num_kv_heads", {"num_key_value_heads", "kv_heads"}},
      {"head_dim", {}},
      {"vocab_size", {"vocab"}},
      {"max_position_embeddings", {"max_seq_len", "n_positions"}},
      {"tie_embeddings", {"tie_word_embeddings"}},
      {"is_moe", {}},
      {"num_local_experts", {"num_experts"}},
      {"experts_per_token", {"num_experts_per_tok"}},
      {"num_shared_experts", {}},
      {"precision", {"torch_dtype"}},
      {"activation_function", {"hidden_act", "activation"}},
      {"gated_mlp", {}},
      {"learned_pos_embeddings", {}},
      {"qkv_bias", {}},
      {"attn_out_bias", {}},
      {"mlp_bias", {}},
      {"norm_bias", {}},
  };
  return specs;
}

const json* find_key(const json& doc, const KeySpec& spec) {
  if (auto it = doc.find(std::string(spec.canonical)); it != doc.end()) {
    return &*it;
  }
  for (std::string_view alias : spec.aliases) {
    if (auto it = doc.find(std::string(alias)); it != doc.end()) return &*it;
  }
  return nullptr;
}

const KeySpec& spec_for(std::string_view canonical) {
  for (const KeySpec& s : key_specs()) {
    if (s.canonical == canonical) return s;
  }
  throw std::logic_error("no key spec for " + std::string(canonical));
}

std::uint32_t read_count(const json& value, std::string_view name) {
  if (!value.is_number_integer() && !value.is_number_unsigned()) {
    throw Error(ErrorCode::kInvalidValue,
                std::string(name) + " must be an integer");
  }
  const auto v = value.get<std::int64_t>();
  if (v < 0 || v > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidValue,
                std::string(name) + " out of range: " + std::to_string(v));
  }
  return static_cast<std::uint32_t>(v);
}

std::uint32_t required_count(const json& doc, std::string_view name) {
  const json* v = find_key(doc, spec_for(name));
  if (v == nullptr) throw Error(ErrorCode::kMissingField, std::string(name));
  return read_count(*v, name);
}

std::uint32_t optional_count(const json& doc, std::string_view name,
                             std::uint32_t fallback) {
  const json* v = find_key(doc, spec_for(name));
  return v == nullptr || v->is_null() ? fallback : read_count(*v, name);
}

bool optional_flag(const json& doc, std::string_view name, bool fallback) {
  const json* v = find_key(doc, spec_for(name));
  if (v == nullptr || v->is_null()) return fallback;
  if (!v->is_boolean()) {
    throw Error(ErrorCode::kInvalidValue,
                std::string(name) + " must be a boolean");
  }
  return v->get<bool>();
}

void require_positive(std::uint32_t value, std::string_view name) {
  if (value == 0) {
    throw Error(ErrorCode::kInvalidValue, std::string(name) + " must be > 0");
  }
}

std::uint64_t ceil_div(unsigned __int128 num, std::uint64_t den) {
  return static_cast<std::uint64_t>((num + den - 1) / den);
}

}  // namespace

std::string_view to_string(AttentionKind kind) {
  switch (kind) {
    case AttentionKind::kMha: return "MHA";
    case AttentionKind::kGqa: return "GQA";
    case AttentionKind::kMqa: return "MQA";
  }
  return "?";
}

ParsedArchitecture parse_architecture(const json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidValue, "architecture must be a JSON object");
  }
  ParsedArchitecture out;
  ArchitectureDescriptor& a = out.arch;

  if (const json* id = find_key(doc, spec_for(kModelId)); id != nullptr) {
    if (!id->is_string()) {
      throw Error(ErrorCode::kInvalidValue, "model_id must be a string");
    }
    a.model_id = id->get<std::string>();
  }
  a.num_layers = required_count(doc, "num_layers");
  a.hidden_size = required_count(doc, "hidden_size");
  a.intermediate_size = required_count(doc, "intermediate_size");
  a.num_attention_heads = required_count(doc, "num_attention_heads");
  a.vocab_size = required_count(doc, "vocab_size");
  a.num_kv_heads = optional_count(doc, "num_kv_heads", a.num_attention_heads);
  a.max_position_embeddings =
      optional_count(doc, "max_position_embeddings", 2048);

  if (const json* hd = find_key(doc, spec_for("head_dim"));
      hd != nullptr && !hd->is_null()) {
    a.head_dim = read_count(*hd, "head_dim");
    a.head_dim_explicit = true;
  } else if (a.num_attention_heads > 0) {
    if (a.hidden_size % a.num_attention_heads != 0) {
      throw Error(ErrorCode::kInvalidValue,
                  "hidden_size is not divisible by num_attention_heads and "
                  "head_dim is absent");
    }
    a.head_dim = a.hidden_size / a.num_attention_heads;
  }

  a.num_local_experts = optional_count(doc, "num_local_experts", 0);
  a.experts_per_token = optional_count(doc, "experts_per_token", 0);
  a.num_shared_experts = optional_count(doc, "num_shared_experts", 0);
  a.is_moe = optional_flag(doc, "is_moe", a.num_local_experts > 0);

  a.tie_embeddings = optional_flag(doc, "tie_embeddings", false);
  a.gated_mlp = optional_flag(doc, "gated_mlp", true);
  a.learned_pos_embeddings = optional_flag(doc, "learned_pos_embeddings", false);
  a.qkv_bias = optional_flag(doc, "qkv_bias", false);
  a.attn_out_bias = optional_flag(doc, "attn_out_bias", false);
  a.mlp_bias = optional_flag(doc, "mlp_bias", false);
  a.norm_bias = optional_flag(doc, "norm_bias", false);

  if (const json* p = find_key(doc, spec_for("precision"));
      p != nullptr && !p->is_null()) {
    if (!p->is_string()) {
      throw Error(ErrorCode::kInvalidValue, "precision must be a string");
    }
    a.precision = parse_precision(p->get<std::string>());
  }
  if (const json* act = find_key(doc, spec_for("activation_function"));
      act != nullptr && act->is_string()) {
    a.activation_function = act->get<std::string>();
  }

  std::set<std::string, std::less<>> known;
  for (const KeySpec& s : key_specs()) {
    known.emplace(s.canonical);
    for (std::string_view alias : s.aliases) known.emplace(alias);
  }
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) out.warnings.push_back("ignored key '" + key + "'");
  }

  validate(a);
  return out;
}

ParsedArchitecture parse_architecture_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return parse_architecture(doc);
}

json to_json(const ArchitectureDescriptor& a) {
  json j = {
      {"model_id", a.model_id},
      {"num_layers", a.num_layers},
      {"hidden_size", a.hidden_size},
      {"intermediate_size", a.intermediate_size},
      {"num_attention_heads", a.num_attention_heads},
      {"num_kv_heads", a.num_kv_heads},
      {"vocab_size", a.vocab_size},
      {"max_position_embeddings", a.max_position_embeddings},
      {"tie_embeddings", a.tie_embeddings},
      {"is_moe", a.is_moe},
      {"num_local_experts", a.num_local_experts},
      {"experts_per_token", a.experts_per_token},
      {"num_shared_experts", a.num_shared_experts},
      {"precision", std::string(to_string(a.precision))},
      {"activation_function", a.activation_function},
      {"gated_mlp", a.gated_mlp},
      {"learned_pos_embeddings", a.learned_pos_embeddings},
      {"qkv_bias", a.qkv_bias},
      {"attn_out_bias", a.attn_out_bias},
      {"mlp_bias", a.mlp_bias},
      {"norm_bias", a.norm_bias},
  };
  if (a.head_dim_explicit) j["head_dim"] = a.head_dim;
  return j;
}

void validate(const ArchitectureDescriptor& a) {
  require_positive(a.num_layers, "num_layers");
  require_positive(a.hidden_size, "hidden_size");
  require_positive(a.intermediate_size, "intermediate_size");
  require_positive(a.num_attention_heads, "num_attention_heads");
  require_positive(a.num_kv_heads, "num_kv_heads");
  require_positive(a.head_dim, "head_dim");
  require_positive(a.vocab_size, "vocab_size");
  require_positive(a.max_position_embeddings, "max_position_embeddings");

  if (a.num_attention_heads % a.num_kv_heads != 0) {
    throw Error(ErrorCode::kInvalidValue,
                "num_kv_heads (" + std::to_string(a.num_kv_heads) +
                    ") does not divide num_attention_heads (" +
                    std::to_string(a.num_attention_heads) + ")");
  }
  if (!a.head_dim_explicit &&
      static_cast<std::uint64_t>(a.head_dim) * a.num_attention_heads !=
          a.hidden_size) {
    throw Error(ErrorCode::kInvalidValue,
                "derived head_dim * num_attention_heads != hidden_size");
  }
  if (!a.is_moe) {
    if (a.num_local_experts != 0 || a.experts_per_token != 0 ||
        a.num_shared_experts != 0) {
      throw Error(ErrorCode::kInvalidValue,
                  "dense architecture must not declare experts");
    }
  } else if (a.experts_per_token < 1 ||
             a.experts_per_token > a.num_local_experts) {
    throw Error(ErrorCode::kInvalidValue,
                "MoE requires 1 <= experts_per_token <= num_local_experts");
  }
}

ParameterBreakdown count_parameters(const ArchitectureDescriptor& a) {
  const std::uint64_t h = a.hidden_size;
  const std::uint64_t hd = a.head_dim;
  const std::uint64_t heads = a.num_attention_heads;
  const std::uint64_t kv = a.num_kv_heads;
  const std::uint64_t inter = a.intermediate_size;
  const std::uint64_t norm_width = a.norm_bias ? 2 : 1;

  ParameterBreakdown b;
  b.embedding_params = static_cast<std::uint64_t>(a.vocab_size) * h;
  if (a.learned_pos_embeddings) {
    b.embedding_params += static_cast<std::uint64_t>(a.max_position_embeddings) * h;
  }

  // Q and O are heads*head_dim wide, K and V kv_heads*head_dim wide.
  std::uint64_t attention = h * hd * (2 * heads + 2 * kv);
  if (a.qkv_bias) attention += hd * (heads + 2 * kv);
  if (a.attn_out_bias) attention += h;

  std::uint64_t mlp = (a.gated_mlp ? 3 : 2) * h * inter;
  if (a.mlp_bias) mlp += (a.gated_mlp ? 2 * inter : inter) + h;
  std::uint64_t ffn = mlp;
  if (a.is_moe) {
    ffn = mlp * (a.num_local_experts + a.num_shared_experts);
    if (a.num_local_experts > 1) ffn += h * a.num_local_experts;  // router
  }

  const std::uint64_t norms = 2 * h * norm_width;
  b.per_layer_params = attention + ffn + norms;
  b.attention_params = attention * a.num_layers;
  b.ffn_params = ffn * a.num_layers;
  b.other_linear_params = h * norm_width;
  if (!a.tie_embeddings) {
    b.other_linear_params += static_cast<std::uint64_t>(a.vocab_size) * h;
  }
  b.total_params = b.embedding_params + a.num_layers * b.per_layer_params +
                   b.other_linear_params;
  return b;
}

std::uint64_t kv_cache_bytes_per_token(const ArchitectureDescriptor& a,
                                       Precision kv_precision) {
  const std::uint64_t half_bytes = half_bytes_per_element(kv_precision);
  if (half_bytes == 0) {
    throw Error(ErrorCode::kUnsupportedPrecision, "KV cache precision");
  }
  const unsigned __int128 elements = static_cast<unsigned __int128>(2) *
                                     a.num_layers * a.num_kv_heads * a.head_dim;
  return ceil_div(elements * half_bytes, 2);
}

std::uint64_t kv_cache_bytes_per_prompt(const ArchitectureDescriptor& a,
                                        Precision kv_precision,
                                        std::uint64_t total_tokens) {
  return kv_cache_bytes_per_token(a, kv_precision) * total_tokens;
}

std::uint64_t vram_required(const ArchitectureDescriptor& a,
                            double weight_overhead) {
  if (!(weight_overhead >= 0.0)) {
    throw Error(ErrorCode::kInvalidValue, "weight overhead must be >= 0");
  }
  constexpr std::uint64_t kPpm = 1'000'000;
  const auto overhead_ppm =
      static_cast<std::uint64_t>(std::llround(weight_overhead * kPpm));
  const unsigned __int128 half_bytes =
      static_cast<unsigned __int128>(count_parameters(a).total_params) *
      half_bytes_per_element(a.precision);
  return ceil_div(half_bytes * (kPpm + overhead_ppm), 2 * kPpm);
}

StructuralField parse_structural_field(std::string_view name) {
  if (name == "num_layers") return StructuralField::kNumLayers;
  if (name == "hidden_size") return StructuralField::kHiddenSize;
  if (name == "intermediate_size") return StructuralField::kIntermediateSize;
  if (name == "num_attention_heads") return StructuralField::kNumAttentionHeads;
  if (name == "num_kv_heads") return StructuralField::kNumKvHeads;
  throw Error(ErrorCode::kInvalidValue,
              "field '" + std::string(name) + "' is not a structural field");
}

ArchitectureDescriptor apply_variant(const ArchitectureDescriptor& arch,
                                     StructuralField field,
                                     std::uint32_t value) {
  ArchitectureDescriptor out = arch;
  switch (field) {
    case StructuralField::kNumLayers: out.num_layers = value; break;
    case StructuralField::kHiddenSize: out.hidden_size = value; break;
    case StructuralField::kIntermediateSize: out.intermediate_size = value; break;
    case StructuralField::kNumAttentionHeads: out.num_attention_heads = value; break;
    case StructuralField::kNumKvHeads: out.num_kv_heads = value; break;
  }
  if (!out.head_dim_explicit) {
    if (out.num_attention_heads == 0 || out.hidden_size == 0 ||
        out.hidden_size % out.num_attention_heads != 0) {
      throw Error(ErrorCode::kInvalidValue,
                  "variant leaves hidden_size not divisible by "
                  "num_attention_heads");
    }
    out.head_dim = out.hidden_size / out.num_attention_heads;
  }
  validate(out);
  return out;
}

AttentionKind classify_attention(const ArchitectureDescriptor& a) {
  if (a.num_kv_heads == a.num_attention_heads) return AttentionKind::kMha;
  if (a.num_kv_heads == 1) return AttentionKind::kMqa;
  return AttentionKind::kGqa;
}

ArchitectureRegistry ArchitectureRegistry::load_directory(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "fixture directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  ArchitectureRegistry reg;
  for (const auto& f : files) {
    ParsedArchitecture parsed = parse_architecture_file(f);
    if (parsed.arch.model_id.empty()) {
      throw Error(ErrorCode::kMissingField, "model_id in " + f.string());
    }
    reg.add(std::move(parsed.arch));
  }
  return reg;
}

void ArchitectureRegistry::add(ArchitectureDescriptor arch) {
  validate(arch);
  std::string id = arch.model_id;
  if (!by_id_.emplace(id, std::move(arch)).second) {
    throw Error(ErrorCode::kInvalidValue, "duplicate fixture " + id);
  }
}

bool ArchitectureRegistry::contains(std::string_view model_id) const {
  return by_id_.find(model_id) != by_id_.end();
}

const ArchitectureDescriptor& ArchitectureRegistry::get(
    std::string_view model_id) const {
  if (auto it = by_id_.find(model_id); it != by_id_.end()) return it->second;
  std::string known;
  for (const auto& [id, _] : by_id_) {
    if (!known.empty()) known += ", ";
    known += id;
  }
  throw Error(ErrorCode::kUnknownModelId,
              "'" + std::string(model_id) + "' (known: " + known + ")");
}

std::vector<std::string> ArchitectureRegistry::ids() const {
  std::vector<std::string> out;
  out.reserve(by_id_.size());
  for (const auto& [id, _] : by_id_) out.push_back(id);
  return out;
}

}  // namespace promptpower
