#pragma once

// Radiation event identification: a sliding window of recent syndromes feeds
// per-qubit defect-rate statistics; a spatial-correlation gate separates a
// localised burst from background noise and yields the burst's centre and
// radius on the chip.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "radqec/surface_code.hpp"

namespace radqec {

struct Detection {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
};

class SyndromeWindow {
public:
    // qubit_detectors[q] lists the detector indices hosted on qubit q (empty
    // for data qubits); coordinates are in the chip frame.
    SyndromeWindow(size_t n_detectors, int32_t rounds,
                   std::vector<std::vector<int32_t>> qubit_detectors,
                   std::vector<std::pair<double, double>> qubit_coords,
                   double avg_min_dist, int32_t k_max = 20)
        : n_detectors_(n_detectors),
          rounds_(rounds),
          k_max_(k_max),
          avg_min_dist_(avg_min_dist),
          qubit_detectors_(std::move(qubit_detectors)),
          qubit_coords_(std::move(qubit_coords)),
          counts_(n_detectors, 0) {
        if (rounds_ < 1) throw std::invalid_argument("SyndromeWindow: rounds must be positive");
        if (k_max_ < 1) throw std::invalid_argument("SyndromeWindow: window capacity must be positive");
        if (avg_min_dist_ <= 0.0)
            throw std::invalid_argument("SyndromeWindow: average minimum distance must be positive");
        if (qubit_detectors_.size() != qubit_coords_.size())
            throw std::invalid_argument("SyndromeWindow: qubit map / coordinate size mismatch");
        for (const auto& dets : qubit_detectors_)
            for (int32_t d : dets)
                if (d < 0 || static_cast<size_t>(d) >= n_detectors_)
                    throw std::invalid_argument("SyndromeWindow: detector index out of range");
    }

    // Ingests one syndrome and runs the identification pass. Returns the
    // estimated burst centre and radius, or nothing when the window shows no
    // spatially correlated excess.
    std::optional<Detection> push_and_detect(const std::vector<uint8_t>& syndrome) {
        if (syndrome.size() != n_detectors_)
            throw std::invalid_argument("SyndromeWindow: syndrome length mismatch");
        if (window_.size() == static_cast<size_t>(k_max_)) {
            const std::vector<uint8_t>& old = window_.front();
            for (size_t i = 0; i < n_detectors_; ++i) counts_[i] -= old[i] ? 1 : 0;
            window_.pop_front();
        }
        window_.push_back(syndrome);
        for (size_t i = 0; i < n_detectors_; ++i) counts_[i] += syndrome[i] ? 1 : 0;

        int64_t k = static_cast<int64_t>(window_.size());
        // A qubit is suspicious when its mean detector rate strictly exceeds
        // alpha = 1/((rounds+1)*K). With rate = sum/(K*n_det) the comparison
        // reduces to the exact integer form (rounds+1)*sum > n_det.
        std::vector<int32_t> pruned;
        std::vector<double> rates;
        for (size_t q = 0; q < qubit_detectors_.size(); ++q) {
            const auto& dets = qubit_detectors_[q];
            if (dets.empty()) continue;
            int64_t sum = 0;
            for (int32_t d : dets) sum += counts_[static_cast<size_t>(d)];
            if (static_cast<int64_t>(rounds_ + 1) * sum > static_cast<int64_t>(dets.size())) {
                pruned.push_back(static_cast<int32_t>(q));
                rates.push_back(static_cast<double>(sum) /
                                (static_cast<double>(k) * static_cast<double>(dets.size())));
            }
        }
        if (pruned.size() <= 2) return std::nullopt;

        // Min-max normalise the pruned rates; a flat profile is kept as is.
        double lo = *std::min_element(rates.begin(), rates.end());
        double hi = *std::max_element(rates.begin(), rates.end());
        std::vector<double> e = rates;
        if (hi > lo)
            for (double& v : e) v = (v - lo) / (hi - lo);

        // Spatial correlation: mean nearest-neighbour distance among the
        // pruned qubits. Background noise spreads across the chip and fails
        // this gate; a burst clusters within a couple of couplers.
        double cf = 0.0;
        for (size_t i = 0; i < pruned.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < pruned.size(); ++j) {
                if (i == j) continue;
                best = std::min(best, dist(pruned[i], pruned[j]));
            }
            cf += best;
        }
        cf /= static_cast<double>(pruned.size());
        if (cf > 2.0 * avg_min_dist_ * (1.0 + 1e-9)) return std::nullopt;

        Detection det;
        double wsum = 0.0, xsum = 0.0, ysum = 0.0;
        for (size_t i = 0; i < pruned.size(); ++i) {
            double w = e[i] * e[i];
            const auto& c = qubit_coords_[static_cast<size_t>(pruned[i])];
            wsum += w;
            xsum += w * c.first;
            ysum += w * c.second;
        }
        det.x = xsum / wsum;
        det.y = ysum / wsum;
        double rsum = 0.0;
        for (size_t i = 0; i < pruned.size(); ++i) {
            const auto& c = qubit_coords_[static_cast<size_t>(pruned[i])];
            double dx = c.first - det.x, dy = c.second - det.y;
            rsum += e[i] * e[i] * std::sqrt(dx * dx + dy * dy);
        }
        det.radius = 2.0 * rsum / wsum;
        return det;
    }

    size_t size() const { return window_.size(); }
    int32_t capacity() const { return k_max_; }
    size_t n_detectors() const { return n_detectors_; }
    const std::vector<int64_t>& column_counts() const { return counts_; }
    const std::vector<std::vector<int32_t>>& qubit_detectors() const { return qubit_detectors_; }
    const std::vector<std::pair<double, double>>& qubit_coords() const { return qubit_coords_; }

private:
    double dist(int32_t a, int32_t b) const {
        const auto& ca = qubit_coords_[static_cast<size_t>(a)];
        const auto& cb = qubit_coords_[static_cast<size_t>(b)];
        double dx = ca.first - cb.first, dy = ca.second - cb.second;
        return std::sqrt(dx * dx + dy * dy);
    }

    size_t n_detectors_;
    int32_t rounds_;
    int32_t k_max_;
    double avg_min_dist_;
    std::vector<std::vector<int32_t>> qubit_detectors_;
    std::vector<std::pair<double, double>> qubit_coords_;
    std::deque<std::vector<uint8_t>> window_;
    std::vector<int64_t> counts_;
};

// Window wired to a scheduled circuit's detectors, hosts, and (possibly
// chip-mapped) qubit coordinates.
inline SyndromeWindow make_syndrome_window(const ScheduledCircuit& circuit, double avg_min_dist,
                                           int32_t k_max = 20) {
    return SyndromeWindow(circuit.detectors.size(), circuit.rounds,
                          qubit_to_stabilisers(circuit), circuit.qubit_coords, avg_min_dist,
                          k_max);
}

// Detectors whose hosting qubit lies inside the detected disc.
inline std::vector<int32_t> affected_detectors(const Detection& det,
                                               const SyndromeWindow& window) {
    std::vector<int32_t> out;
    const auto& coords = window.qubit_coords();
    for (size_t q = 0; q < coords.size(); ++q) {
        if (window.qubit_detectors()[q].empty()) continue;
        double dx = coords[q].first - det.x, dy = coords[q].second - det.y;
        if (std::sqrt(dx * dx + dy * dy) <= det.radius) {
            const auto& dets = window.qubit_detectors()[q];
            out.insert(out.end(), dets.begin(), dets.end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace radqec
