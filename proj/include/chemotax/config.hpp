#pragma once

/// Text form of RunConfig. The format is line-oriented `key = value`
/// with `#` comments; a `[section]` header prefixes the keys that
/// follow it, so `[grid]` + `n = 64` and the flat `grid.n = 64` are
/// the same statement. Keys mirror the config fields one-to-one
/// (e.g. model.species.0.chi); unknown keys, duplicate assignments,
/// and malformed values are hard errors naming the offending key.
/// Serialization uses shortest round-trip number formatting, so
/// parse(text(cfg)) reproduces cfg -- and hence its run -- bitwise.

#include <string>
#include <vector>

#include "chemotax/core.hpp"

namespace chemotax::config {

/// Parse config text. Required keys: grid.n, grid.length,
/// model.family, run.dt, run.t_final; everything else defaults.
/// Semantic validation is the caller's job (validate/require_valid).
RunConfig parse_run_config(const std::string& text);

/// read_file + parse_run_config.
RunConfig load_run_config(const std::string& path);

/// Canonical text form. Throws for explicit initial data, which has
/// no text representation (arrays live in snapshot files instead).
std::string run_config_text(const RunConfig& cfg);

/// Apply `path=value` assignments in order, using the same key schema
/// as the file format. Unknown paths throw UnknownKey carrying the
/// full rejected path. Indexed paths may append one past the end of
/// their array (e.g. model.signal.alpha.1 when only alpha.0 exists);
/// gaps are rejected.
void apply_overrides(RunConfig& cfg,
                     const std::vector<std::string>& overrides);

}  // namespace chemotax::config
