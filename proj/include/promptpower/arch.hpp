// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Structural description of decoder-only transformers and the quantities
// derived from it: parameter breakdown, KV-cache footprint, weight memory.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptpower/precision.hpp"

namespace promptpower {

struct ArchitectureDescriptor {
  std::string model_id;
  std::uint32_t num_layers = 0;
  std::uint32_t hidden_size = 0;
  std::uint32_t intermediate_size = 0;
  std::uint32_t num_attention_heads = 0;
  std::uint32_t num_kv_heads = 0;
  std::uint32_t head_dim = 0;
  // False when head_dim was derived as hidden_size / num_attention_heads;
  // derived values are recomputed when a variant changes those fields.
  bool head_dim_explicit = false;
  std::uint32_t vocab_size = 0;
  std::uint32_t max_position_embeddings = 0;
  bool tie_embeddings = false;
  bool is_moe = false;
  std::uint32_t num_local_experts = 0;
  std::uint32_t experts_per_token = 0;
  // Always-active experts of the same width as the routed ones.
  std::uint32_t num_shared_experts = 0;
  Precision precision = Precision::kBf16;
  std::string activation_function;

  // Counting flags.
  bool gated_mlp = true;
  bool learned_pos_embeddings = false;
  bool qkv_bias = false;
  bool attn_out_bias = false;
  bool mlp_bias = false;
  bool norm_bias = false;

  friend bool operator==(const ArchitectureDescriptor&,
                         const ArchitectureDescriptor&) = default;
};

struct ParameterBreakdown {
  std::uint64_t embedding_params = 0;
  // Summed over all layers.
  std::uint64_t attention_params = 0;
  std::uint64_t ffn_params = 0;
  // Final norm plus the untied LM head.
  std::uint64_t other_linear_params = 0;
  std::uint64_t per_layer_params = 0;
  std::uint64_t total_params = 0;
};

enum class AttentionKind { kMha, kGqa, kMqa };
std::string_view to_string(AttentionKind kind);

struct ParsedArchitecture {
  ArchitectureDescriptor arch;
  std::vector<std::string> warnings;  // one per ignored key
};

// Reads a descriptor from a JSON object. Accepts the descriptor's own key
// names plus the common HuggingFace aliases (num_hidden_layers,
// num_key_value_heads, torch_dtype, ...).
ParsedArchitecture parse_architecture(const nlohmann::json& doc);
ParsedArchitecture parse_architecture_file(const std::filesystem::path& path);

nlohmann::json to_json(const ArchitectureDescriptor& arch);

// Throws InvalidValue naming the first broken invariant.
void validate(const ArchitectureDescriptor& arch);

ParameterBreakdown count_parameters(const ArchitectureDescriptor& arch);

std::uint64_t kv_cache_bytes_per_token(const ArchitectureDescriptor& arch,
                                       Precision kv_precision);
std::uint64_t kv_cache_bytes_per_prompt(const ArchitectureDescriptor& arch,
                                        Precision kv_precision,
                                        std::uint64_t total_tokens);

inline constexpr double kDefaultWeightOverhead = 0.05;

// Weight memory: total_params * bytes_per_element * (1 + overhead), rounded
// up to whole bytes. The overhead is resolved to parts-per-million so the
// product stays an exact integer computation.
std::uint64_t vram_required(const ArchitectureDescriptor& arch,
                            double weight_overhead = kDefaultWeightOverhead);

enum class StructuralField {
  kNumLayers,
  kHiddenSize,
  kIntermediateSize,
  kNumAttentionHeads,
  kNumKvHeads,
};
StructuralField parse_structural_field(std::string_view name);

ArchitectureDescriptor apply_variant(const ArchitectureDescriptor& arch,
                                     StructuralField field,
                                     std::uint32_t value);

AttentionKind classify_attention(const ArchitectureDescriptor& arch);

// Fixture set keyed by model_id.
class ArchitectureRegistry {
 public:
  ArchitectureRegistry() = default;

  static ArchitectureRegistry load_directory(const std::filesystem::path& dir);

  void add(ArchitectureDescriptor arch);
  bool contains(std::string_view model_id) const;
  // Throws UnknownModelId listing the known ids.
  const ArchitectureDescriptor& get(std::string_view model_id) const;
  std::vector<std::string> ids() const;
  std::size_t size() const { return by_id_.size(); }

 private:
  std::map<std::string, ArchitectureDescriptor, std::less<>> by_id_;
};

}  // namespace promptpower
