#pragma once
// Command-line front end: `analyze`, `placebo`, `diagnose`, `simulate`.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bracket/bracketing.hpp"
#include "bracket/config.hpp"
#include "bracket/placebo.hpp"

namespace bracket {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitInternal = 4 };

// Runs the CLI with argv-style arguments (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Resolves the study design for `cfg`: explicit groups when given, otherwise
// constructed from prestudy data over the candidate set.
StudyDesign resolve_design(const AnalysisConfig& cfg, const PanelDataset& panel,
                           const std::optional<AdjacencyGraph>& adjacency,
                           std::optional<ControlGroups>* construction = nullptr);

}  // namespace bracket
