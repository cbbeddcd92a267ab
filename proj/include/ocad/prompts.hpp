#pragma once

#include <string_view>

namespace ocad::prompts {

// Bump the version whenever a preamble's wording changes, so stored replies
// can be traced to the instruction that produced them.
inline constexpr std::string_view kVersion = "1";

inline constexpr std::string_view kFeatureTablePreamble =
    "You are a process mining analyst. Below are statistics of features "
    "extracted from an object-centric event log, one line per feature. "
    "Using domain knowledge of the process, identify anomalous patterns: "
    "features whose ranges, percentiles or rare values point to "
    "non-compliant or inefficient behavior. Answer as a numbered list.";

inline constexpr std::string_view kLifecyclePreamble =
    "You are a process mining analyst. Below is the chronological lifecycle "
    "of a single object from an object-centric event log, followed by "
    "summary counts. Identify anomalous patterns in this lifecycle such as "
    "unusual event orders, duplicate timestamps, repeated activities or "
    "unusually long gaps. Answer as a numbered list.";

}  // namespace ocad::prompts
