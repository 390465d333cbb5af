#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "mural2scene/manifest.hpp"

namespace mural2scene::detail {

struct DecodeContext {
  std::string doc_path;
  Diagnostics diags;

  void error(const std::string &code, const std::string &message, SourceLoc loc);
  void warning(const std::string &code, const std::string &message, SourceLoc loc);
};

/// Field access over one object value. Tracks which keys were consulted so
/// finish() can flag everything else as UNKNOWN_FIELD.
class ObjectReader {
 public:
  ObjectReader(const text::Value &v, DecodeContext &ctx, std::string where);

  bool valid() const { return valid_; }

  std::optional<std::string> string(const std::string &key, bool required);
  std::optional<double> real(const std::string &key, bool required);
  std::optional<std::int64_t> integer(const std::string &key, bool required);
  const text::Value *array(const std::string &key, bool required);
  const text::Value *object(const std::string &key, bool required);
  const text::Value *any(const std::string &key, bool required);
  SourceLoc loc_of(const std::string &key) const;

  void finish();

 private:
  const text::Value *lookup(const std::string &key, bool required);
  const text::Value *typed(const std::string &key, text::Kind kind, bool required);

  const text::Value &v_;
  DecodeContext &ctx_;
  std::string where_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

std::string join_path(const std::string &where, const std::string &key);
std::string index_path(const std::string &where, std::size_t i);

std::optional<narrative::Event> decode_event(const text::Value &v, DecodeContext &ctx,
                                             const std::string &where);

std::optional<narrative::NarrativeGraph> decode_narrative(const text::Value &v,
                                                          DecodeContext &ctx,
                                                          const std::string &where);
text::Value encode_narrative(const narrative::NarrativeGraph &g);

/// Per-entity value ranges and source resolution: the checks every parsed
/// manifest already satisfies. With `whole_scene`, also id uniqueness and
/// the Panorama capture, which validation reports but parsing tolerates.
Diagnostics check_invariants(const SceneManifest &m, const std::string &doc_path,
                             bool whole_scene);

}  // namespace mural2scene::detail
