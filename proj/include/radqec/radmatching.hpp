#pragma once

// Radiation-aware decoding: run the identification window over the incoming
// syndrome stream and, when a burst is located, invert the detection events
// inside the affected disc before handing the shot to exact matching.

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "radqec/decoders.hpp"
#include "radqec/rei.hpp"

namespace radqec {

struct RadMatchConfig {
    int32_t k_max = 20;
    bool invert_affected = true;  // policy switch: detection only vs. full inversion
};

// Stateful per-stream decoder: the window must see every shot of one stream
// in order. The stored window keeps the raw, uninverted syndromes; only the
// copy handed to the matcher is processed.
inline DecodeResult radmatch_decode(const MatchingContext& ctx, SyndromeWindow& window,
                                    const std::vector<uint8_t>& events,
                                    const RadMatchConfig& config = {},
                                    std::optional<Detection>* detection_out = nullptr,
                                    double* rei_time_out = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    std::optional<Detection> det = window.push_and_detect(events);
    if (rei_time_out)
        *rei_time_out =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (detection_out) *detection_out = det;
    if (!det || !config.invert_affected) return mwpm_decode(ctx, events);

    std::vector<uint8_t> processed = events;
    for (int32_t idx : affected_detectors(*det, window))
        processed[static_cast<size_t>(idx)] ^= 1;
    return mwpm_decode(ctx, processed);
}

}  // namespace radqec
