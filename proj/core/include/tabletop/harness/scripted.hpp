#pragma once

#include <memory>
#include <vector>

#include "tabletop/agents/backend.hpp"
#include "tabletop/harness/experiments.hpp"

namespace tabletop::harness {

// Canned agent responses that carry out one experiment's intent: the
// relevant-object listing, the four-part plan, and each step's action
// sequence. Keys digest only task semantics, so a single table covers every
// randomized layout of the experiment's scene.
void install_policy(agents::ScriptedBackend& backend, const Experiment& exp);

std::shared_ptr<agents::ScriptedBackend> make_scripted_backend(
    const std::vector<Experiment>& experiments);

}  // namespace tabletop::harness
