#pragma once

#include <string>
#include <variant>

#include "swtag/core.hpp"
#include "swtag/hmm_tagger.hpp"
#include "swtag/lsw_tagger.hpp"
#include "swtag/sw_tagger.hpp"

namespace swtag {

/// Versioned UTF-8 model files. Values are written as hexadecimal floats,
/// so save -> load -> save is byte-identical and values survive bit-exactly.
/// Entry lines are `C-;center;C+<TAB>value` with comma-separated ids,
/// sorted by key. The sw and hmm formats embed the ambiguity classes their
/// keys and columns refer to; class ids are re-interned (and keys remapped)
/// into the loading inventory, so models are portable across processes
/// whose class interning order differs.
void save_model(const SwModel& model, const TagInventory& tags,
                const AmbiguityInventory& inv, const std::string& path);
void save_model(const LswModel& model, const TagInventory& tags,
                const std::string& path);
void save_model(const HmmModel& model, const TagInventory& tags,
                const AmbiguityInventory& inv, const std::string& path);

using AnyModel = std::variant<SwModel, LswModel, HmmModel>;

/// Dispatches on the version line. Throws on version or tagset-hash
/// mismatch and on malformed content (with the offending line number).
/// Classes referenced by the file are interned into `inv`.
AnyModel load_model(const std::string& path, const TagInventory& tags,
                    AmbiguityInventory& inv);

}  // namespace swtag
