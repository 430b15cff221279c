#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "radqec/chip.hpp"
#include "radqec/config.hpp"
#include "radqec/decoders.hpp"
#include "radqec/detector_graph.hpp"
#include "radqec/frame_sim.hpp"
#include "radqec/noise.hpp"
#include "radqec/radmatching.hpp"
#include "radqec/rei.hpp"
#include "radqec/surface_code.hpp"
#include "radqec/util.hpp"

namespace radqec {

// ---------------------------------------------------------------------------
// Bench geometry
//
// Single-code bench: one distance-d patch on a (d+2)x(d+2)-cell grid chip,
// embedded at offset (2,2) so a one-cell margin of spare qubits surrounds it.
// The chip lattice spans [0, 2d+4]^2; the patch occupies [2, 2d+2]^2.
//
// Multi-code bench: four patches on a (3d+2)x(3d+2)-cell grid chip (lattice
// [0, 6d+4]^2) at compass offsets around the centre, pitch s = 2d+2:
//   N=(s,2s)  S=(s,0)  W=(0,s)  E=(2s,s)
// ---------------------------------------------------------------------------

struct CodeBench {
    Chip chip;
    SurfaceCode code;  // circuit rebased to chip coordinates
    double avg_min_dist = 0.0;
};

inline CodeBench make_single_bench(int32_t distance, int32_t rounds, Basis basis) {
    CodeBench b{build_grid_chip(distance + 2, distance + 2),
                build_rotated_surface_code(distance, rounds, basis), 0.0};
    Mapping m = embed_layout(b.chip, b.code.layout, 2.0, 2.0);
    apply_mapping(b.code.circuit, b.chip, m);
    b.avg_min_dist = device_avg_min_dist(b.chip);
    return b;
}

inline std::optional<std::pair<double, double>> parse_xy_locus(const std::string& label) {
    auto comma = label.find(',');
    if (comma == std::string::npos) return std::nullopt;
    auto parse = [&](const std::string& part) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(part, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != part.size())
            throw std::runtime_error("locus: bad coordinate '" + part + "' in '" + label + "'");
        return v;
    };
    return std::make_pair(parse(ConfigMap::trim(label.substr(0, comma))),
                          parse(ConfigMap::trim(label.substr(comma + 1))));
}

// Named impact sites on the single-code bench, or raw "x,y" chip coordinates.
inline std::pair<double, double> resolve_single_locus(const std::string& label, int32_t d) {
    if (label == "Central") return {double(d + 2), double(d + 2)};
    if (label == "North-West") return {3.0, double(2 * d + 1)};
    if (label == "West") return {0.0, double(d + 1)};
    if (auto xy = parse_xy_locus(label)) return *xy;
    throw std::runtime_error("unknown locus '" + label +
                             "' (single-code benches take Central, North-West, West or \"x,y\")");
}

// Named impact sites on the multi-code bench. Central sits equidistant from
// all four patches; North is the centre of the N patch.
inline std::pair<double, double> resolve_multi_locus(const std::string& label, int32_t d) {
    if (label == "Central") return {double(3 * d + 2), double(3 * d + 2)};
    if (label == "North") return {double(3 * d + 2), double(5 * d + 4)};
    if (label == "North-East") return {double(4 * d + 3), double(4 * d + 3)};
    if (auto xy = parse_xy_locus(label)) return *xy;
    throw std::runtime_error("unknown locus '" + label +
                             "' (multi-code benches take Central, North, North-East or \"x,y\")");
}

inline char basis_letter(Basis b) { return b == Basis::Z ? 'Z' : 'X'; }

// Shots per sequence: explicit count, or enough back-to-back shots to cover
// the time horizon.
inline int32_t shots_for(const ScenarioConfig& cfg, const ScheduledCircuit& circuit) {
    if (cfg.shots > 0) return cfg.shots;
    double n = std::ceil(cfg.horizon / circuit.total_duration);
    if (!(n >= 1.0)) n = 1.0;
    if (n > 5e6) throw std::runtime_error("experiments: horizon asks for more than 5e6 shots per sequence");
    return static_cast<int32_t>(n);
}

inline RadiationEvent event_at(std::pair<double, double> locus, const ScenarioConfig& cfg) {
    RadiationEvent ev;
    ev.x = locus.first;
    ev.y = locus.second;
    ev.t_rad = cfg.t_rad;
    ev.dt_rad = cfg.dt_rad;
    ev.tau1 = cfg.tau1;
    return ev;
}

// Runs fn(seq) for seq in [0, sequences) across a small thread pool. Each
// sequence owns disjoint result slots, so results are identical for any
// thread count; the first exception is rethrown after the pool drains.
template <typename Fn>
inline void for_each_sequence(int32_t sequences, int32_t threads, Fn&& fn) {
    int32_t pool_size = std::min(threads, sequences);
    if (pool_size <= 1) {
        for (int32_t s = 0; s < sequences; ++s) fn(s);
        return;
    }
    std::atomic<int32_t> next{0};
    std::mutex mu;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            int32_t s = next.fetch_add(1);
            if (s >= sequences) return;
            try {
                fn(s);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(pool_size));
    for (int32_t t = 0; t < pool_size; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Detection time series: many independent shot sequences against one bench,
// burst identification running over the stream. Aggregates are reduced in
// sequence order, so output is bit-stable across thread counts.
// ---------------------------------------------------------------------------

struct DetectionSeries {
    double shot_duration = 0.0;
    std::vector<double> detection_rate;  // per bin: fraction of sequences with a detection
    std::vector<double> affected_ratio;  // per bin: mean |affected| / n_detectors (0 when none)
    std::vector<int32_t> first_detected;  // per sequence: first detecting bin, -1 if never
    std::vector<int32_t> last_detected;   // per sequence: last detecting bin, -1 if never
};

inline DetectionSeries detection_series(const CodeBench& bench, std::pair<double, double> locus,
                                        const ScenarioConfig& cfg, uint64_t block_seed,
                                        int32_t shots) {
    const ScheduledCircuit& circ = bench.code.circuit;
    const double n_det = static_cast<double>(circ.detectors.size());
    const size_t n_cells = static_cast<size_t>(cfg.sequences) * static_cast<size_t>(shots);
    std::vector<uint8_t> hit(n_cells, 0);
    std::vector<double> ratio(n_cells, 0.0);

    DetectionSeries out;
    out.shot_duration = circ.total_duration;
    out.first_detected.assign(static_cast<size_t>(cfg.sequences), -1);
    out.last_detected.assign(static_cast<size_t>(cfg.sequences), -1);

    std::vector<RadiationEvent> events;
    if (cfg.radiation) events.push_back(event_at(locus, cfg));

    for_each_sequence(cfg.sequences, cfg.threads, [&](int32_t s) {
        FrameSampler sampler(circ, NoiseParams{cfg.p}, events, derive_seed(block_seed, static_cast<uint64_t>(s)));
        SyndromeWindow win = make_syndrome_window(circ, bench.avg_min_dist, cfg.k_max);
        const size_t base = static_cast<size_t>(s) * static_cast<size_t>(shots);
        for (int32_t i = 0; i < shots; ++i) {
            ShotResult shot = sampler.sample_shot(static_cast<double>(i) * circ.total_duration);
            if (auto det = win.push_and_detect(shot.detection_events)) {
                hit[base + static_cast<size_t>(i)] = 1;
                ratio[base + static_cast<size_t>(i)] =
                    static_cast<double>(affected_detectors(*det, win).size()) / n_det;
                if (out.first_detected[static_cast<size_t>(s)] < 0)
                    out.first_detected[static_cast<size_t>(s)] = i;
                out.last_detected[static_cast<size_t>(s)] = i;
            }
        }
    });

    out.detection_rate.assign(static_cast<size_t>(shots), 0.0);
    out.affected_ratio.assign(static_cast<size_t>(shots), 0.0);
    for (int32_t s = 0; s < cfg.sequences; ++s) {
        const size_t base = static_cast<size_t>(s) * static_cast<size_t>(shots);
        for (int32_t i = 0; i < shots; ++i) {
            out.detection_rate[static_cast<size_t>(i)] += hit[base + static_cast<size_t>(i)];
            out.affected_ratio[static_cast<size_t>(i)] += ratio[base + static_cast<size_t>(i)];
        }
    }
    for (int32_t i = 0; i < shots; ++i) {
        out.detection_rate[static_cast<size_t>(i)] /= cfg.sequences;
        out.affected_ratio[static_cast<size_t>(i)] /= cfg.sequences;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output formatting: CSV, a self-contained SVG line chart, and a manifest
// with content hashes for every emitted file.
// ---------------------------------------------------------------------------

inline std::string fmt_g(double v, int precision = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct ChartSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

inline std::string svg_line_chart(const std::string& title, const std::string& x_label,
                                  const std::string& y_label, const std::vector<ChartSeries>& series) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    constexpr int kColors = 8;
    const double width = 860.0, height = 520.0;
    const double ml = 78.0, mr = 190.0, mt = 48.0, mb = 58.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool any = false;
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                any = true;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    }
    if (!any) {
        xmin = ymin = 0.0;
        xmax = ymax = 1.0;
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    ymin = std::min(ymin, 0.0);
    if (ymax <= ymin) ymax = ymin + 1.0;
    ymax += 0.05 * (ymax - ymin);

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n"
        << "<text x=\"" << ml + pw / 2 << "\" y=\"26\" font-family=\"sans-serif\" font-size=\"16\" "
           "text-anchor=\"middle\">"
        << title << "</text>\n";

    for (int t = 0; t <= 5; ++t) {
        double fx = xmin + (xmax - xmin) * t / 5.0;
        double fy = ymin + (ymax - ymin) * t / 5.0;
        double gx = px(fx), gy = py(fy);
        svg << "<line x1=\"" << fmt_g(gx, 6) << "\" y1=\"" << mt << "\" x2=\"" << fmt_g(gx, 6)
            << "\" y2=\"" << mt + ph << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            << "<line x1=\"" << ml << "\" y1=\"" << fmt_g(gy, 6) << "\" x2=\"" << ml + pw
            << "\" y2=\"" << fmt_g(gy, 6) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            << "<text x=\"" << fmt_g(gx, 6) << "\" y=\"" << mt + ph + 18
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fmt_g(fx, 4)
            << "</text>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << fmt_g(gy + 4, 6)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt_g(fy, 4)
            << "</text>\n";
    }
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#444444\"/>\n"
        << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 14
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << x_label
        << "</text>\n"
        << "<text x=\"20\" y=\"" << mt + ph / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << mt + ph / 2 << ")\">" << y_label << "</text>\n";

    for (size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % kColors];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            svg << fmt_g(px(s.x[i]), 6) << "," << fmt_g(py(s.y[i]), 6) << " ";
        }
        svg << "\"/>\n";
        double ly = mt + 14 + 18.0 * static_cast<double>(k);
        svg << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << fmt_g(ly - 4, 6) << "\" x2=\""
            << ml + pw + 34 << "\" y2=\"" << fmt_g(ly - 4, 6) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << ml + pw + 40 << "\" y=\"" << fmt_g(ly, 6)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.name << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline nlohmann::json config_json(const ScenarioConfig& c) {
    nlohmann::json j;
    j["distances"] = c.distances;
    j["rounds"] = c.rounds;
    j["basis"] = c.both_bases ? "both" : std::string(1, basis_letter(c.basis));
    j["p"] = c.p;
    j["loci"] = c.loci;
    j["radiation"] = c.radiation;
    j["t_rad"] = c.t_rad;
    j["dt_rad"] = c.dt_rad;
    j["tau1"] = c.tau1;
    j["sequences"] = c.sequences;
    j["shots"] = c.shots;
    j["horizon"] = c.horizon;
    std::vector<std::string> dec;
    for (DecoderKind k : c.decoders) dec.push_back(decoder_name(k));
    j["decoders"] = dec;
    j["seed"] = c.seed;
    j["out"] = c.out_dir;
    j["threads"] = c.threads;
    j["k_max"] = c.k_max;
    return j;
}

// Writes every (name, content) pair under <out>/<scenario>/ plus a
// manifest.json carrying the scenario config and a content hash per file.
inline std::filesystem::path emit_artifacts(const ScenarioConfig& cfg, const std::string& scenario,
                                            const std::vector<std::pair<std::string, std::string>>& files) {
    std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / scenario;
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["scenario"] = scenario;
    manifest["seed"] = cfg.seed;
    manifest["config"] = config_json(cfg);
    manifest["artifacts"] = nlohmann::json::array();
    for (const auto& [name, content] : files) {
        std::ofstream out(dir / name, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error("emit_artifacts: cannot write " + (dir / name).string());
        manifest["artifacts"].push_back({{"file", name},
                                         {"bytes", content.size()},
                                         {"fnv1a64", to_hex(fnv1a64(content))}});
    }
    std::ofstream mo(dir / "manifest.json", std::ios::binary);
    mo << manifest.dump(2) << "\n";
    if (!mo) throw std::runtime_error("emit_artifacts: cannot write manifest.json");
    return dir;
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median_of: empty sample");
    size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2) return hi;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid) - 1, v.end());
    return 0.5 * (v[mid - 1] + hi);
}

inline double mad_of(const std::vector<double>& v, double med) {
    std::vector<double> dev;
    dev.reserve(v.size());
    for (double x : v) dev.push_back(std::abs(x - med));
    return median_of(std::move(dev));
}

// ---------------------------------------------------------------------------
// Scenario: distance sweep. One burst locus, several code distances (and
// optionally both memory bases); records the burst-detection rate and the
// affected-area fraction over time.
// ---------------------------------------------------------------------------

struct SweepRow {
    int32_t distance;
    Basis basis;
    int32_t bin;
    double time_s;
    double detection_rate;
    double affected_ratio;
};

struct BlockTiming {
    std::string block;
    double wall_s;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<BlockTiming> timings;
};

inline SweepResult compute_distance_sweep(const ScenarioConfig& cfg) {
    SweepResult res;
    std::vector<Basis> bases;
    if (cfg.both_bases)
        bases = {Basis::Z, Basis::X};
    else
        bases = {cfg.basis};
    uint64_t block = 0;
    for (int32_t d : cfg.distances) {
        for (Basis basis : bases) {
            int32_t r = cfg.rounds > 0 ? cfg.rounds : d;
            CodeBench bench = make_single_bench(d, r, basis);
            auto locus = resolve_single_locus(cfg.loci.front(), d);
            int32_t shots = shots_for(cfg, bench.code.circuit);
            auto t0 = std::chrono::steady_clock::now();
            DetectionSeries ser = detection_series(bench, locus, cfg, derive_seed(cfg.seed, block), shots);
            auto t1 = std::chrono::steady_clock::now();
            ++block;
            for (int32_t i = 0; i < shots; ++i)
                res.rows.push_back({d, basis, i, static_cast<double>(i) * ser.shot_duration,
                                    ser.detection_rate[static_cast<size_t>(i)],
                                    ser.affected_ratio[static_cast<size_t>(i)]});
            res.timings.push_back({"d=" + std::to_string(d) + " " + basis_letter(basis),
                                   std::chrono::duration<double>(t1 - t0).count()});
        }
    }
    return res;
}

inline std::filesystem::path run_distance_sweep(const ScenarioConfig& cfg) {
    SweepResult res = compute_distance_sweep(cfg);
    std::ostringstream csv;
    csv << "distance,basis,bin,time_s,detection_rate,affected_ratio\n";
    for (const auto& r : res.rows)
        csv << r.distance << "," << basis_letter(r.basis) << "," << r.bin << "," << fmt_g(r.time_s)
            << "," << fmt_g(r.detection_rate) << "," << fmt_g(r.affected_ratio) << "\n";

    std::ostringstream tim;
    tim << "block,wall_s\n";
    for (const auto& t : res.timings) tim << csv_field(t.block) << "," << fmt_g(t.wall_s) << "\n";

    std::vector<ChartSeries> det, aff;
    for (const auto& r : res.rows) {
        std::string name = "d=" + std::to_string(r.distance) + " " + basis_letter(r.basis);
        if (det.empty() || det.back().name != name) {
            det.push_back({name, {}, {}});
            aff.push_back({name, {}, {}});
        }
        det.back().x.push_back(r.time_s);
        det.back().y.push_back(r.detection_rate);
        aff.back().x.push_back(r.time_s);
        aff.back().y.push_back(r.affected_ratio);
    }
    return emit_artifacts(cfg, "distance-sweep",
                          {{"metrics.csv", csv.str()},
                           {"timings.csv", tim.str()},
                           {"chart.svg", svg_line_chart("Burst detection rate over time", "time (s)",
                                                        "detection rate", det)},
                           {"affected.svg", svg_line_chart("Affected-area fraction over time", "time (s)",
                                                           "affected fraction", aff)}});
}

// ---------------------------------------------------------------------------
// Scenario: position study. One distance, several burst loci.
// ---------------------------------------------------------------------------

struct PositionRow {
    std::string locus;
    int32_t bin;
    double time_s;
    double detection_rate;
    double affected_ratio;
};

struct PositionResult {
    std::vector<PositionRow> rows;
    std::vector<BlockTiming> timings;
};

inline PositionResult compute_position_study(const ScenarioConfig& cfg) {
    PositionResult res;
    int32_t d = cfg.distances.front();
    int32_t r = cfg.rounds > 0 ? cfg.rounds : d;
    CodeBench bench = make_single_bench(d, r, cfg.basis);
    int32_t shots = shots_for(cfg, bench.code.circuit);
    for (const std::string& label : cfg.loci) {
        auto locus = resolve_single_locus(label, d);
        auto t0 = std::chrono::steady_clock::now();
        DetectionSeries ser =
            detection_series(bench, locus, cfg, derive_seed(cfg.seed, fnv1a64(label)), shots);
        auto t1 = std::chrono::steady_clock::now();
        for (int32_t i = 0; i < shots; ++i)
            res.rows.push_back({label, i, static_cast<double>(i) * ser.shot_duration,
                                ser.detection_rate[static_cast<size_t>(i)],
                                ser.affected_ratio[static_cast<size_t>(i)]});
        res.timings.push_back({label, std::chrono::duration<double>(t1 - t0).count()});
    }
    return res;
}

inline std::filesystem::path run_position_study(const ScenarioConfig& cfg) {
    PositionResult res = compute_position_study(cfg);
    std::ostringstream csv;
    csv << "locus,bin,time_s,detection_rate,affected_ratio\n";
    for (const auto& r : res.rows)
        csv << csv_field(r.locus) << "," << r.bin << "," << fmt_g(r.time_s) << ","
            << fmt_g(r.detection_rate) << "," << fmt_g(r.affected_ratio) << "\n";

    std::ostringstream tim;
    tim << "block,wall_s\n";
    for (const auto& t : res.timings) tim << csv_field(t.block) << "," << fmt_g(t.wall_s) << "\n";

    std::vector<ChartSeries> det, aff;
    for (const auto& r : res.rows) {
        if (det.empty() || det.back().name != r.locus) {
            det.push_back({r.locus, {}, {}});
            aff.push_back({r.locus, {}, {}});
        }
        det.back().x.push_back(r.time_s);
        det.back().y.push_back(r.detection_rate);
        aff.back().x.push_back(r.time_s);
        aff.back().y.push_back(r.affected_ratio);
    }
    return emit_artifacts(cfg, "position-study",
                          {{"metrics.csv", csv.str()},
                           {"timings.csv", tim.str()},
                           {"chart.svg", svg_line_chart("Burst detection rate by impact site", "time (s)",
                                                        "detection rate", det)},
                           {"affected.svg", svg_line_chart("Affected-area fraction by impact site",
                                                           "time (s)", "affected fraction", aff)}});
}

// ---------------------------------------------------------------------------
// Scenario: identification overhead. Times the burst-identification step
// against a full matching decode, call by call, on syndromes drawn while a
// burst is active. Runs single-threaded so the timings are honest; the
// deterministic workload summary (defect counts) lands in metrics.csv and
// the wall-clock medians in timings.csv.
// ---------------------------------------------------------------------------

struct OverheadRow {
    int32_t distance;
    int32_t calls;
    double mean_defects;
};

struct OverheadTiming {
    int32_t distance;
    double rei_median_s;
    double rei_mad_s;
    double mwpm_median_s;
    double mwpm_mad_s;
    double ratio;  // rei_median_s / mwpm_median_s
};

struct OverheadResult {
    std::vector<OverheadRow> rows;
    std::vector<OverheadTiming> timings;
};

inline OverheadResult compute_overhead(const ScenarioConfig& cfg) {
    OverheadResult res;
    int32_t calls = cfg.shots > 0 ? cfg.shots : 32;
    for (int32_t d : cfg.distances) {
        int32_t r = cfg.rounds > 0 ? cfg.rounds : d;
        CodeBench bench = make_single_bench(d, r, cfg.basis);
        const ScheduledCircuit& circ = bench.code.circuit;
        auto locus = resolve_single_locus(cfg.loci.front(), d);
        DetectorGraph graph = build_graph(circ, NoiseParams{cfg.p});
        std::vector<RadiationEvent> events;
        if (cfg.radiation) events.push_back(event_at(locus, cfg));
        FrameSampler sampler(circ, NoiseParams{cfg.p}, events,
                             derive_seed(cfg.seed, static_cast<uint64_t>(d)));
        SyndromeWindow win = make_syndrome_window(circ, bench.avg_min_dist, cfg.k_max);

        std::vector<double> rei_s, mwpm_s;
        rei_s.reserve(static_cast<size_t>(calls));
        mwpm_s.reserve(static_cast<size_t>(calls));
        double defects = 0.0;
        for (int32_t i = 0; i < calls; ++i) {
            ShotResult shot = sampler.sample_shot(static_cast<double>(i) * circ.total_duration);
            for (uint8_t b : shot.detection_events) defects += b;
            auto t0 = std::chrono::steady_clock::now();
            (void)win.push_and_detect(shot.detection_events);
            auto t1 = std::chrono::steady_clock::now();
            rei_s.push_back(std::chrono::duration<double>(t1 - t0).count());
            DecodeResult dec = mwpm_decode(graph, shot.detection_events);
            mwpm_s.push_back(dec.decode_time);
        }
        res.rows.push_back({d, calls, defects / calls});
        double rm = median_of(rei_s), mm = median_of(mwpm_s);
        res.timings.push_back({d, rm, mad_of(rei_s, rm), mm, mad_of(mwpm_s, mm),
                               mm > 0.0 ? rm / mm : std::numeric_limits<double>::infinity()});
    }
    return res;
}

inline std::filesystem::path run_overhead(const ScenarioConfig& cfg) {
    OverheadResult res = compute_overhead(cfg);
    std::ostringstream csv;
    csv << "distance,calls,mean_defects\n";
    for (const auto& r : res.rows)
        csv << r.distance << "," << r.calls << "," << fmt_g(r.mean_defects) << "\n";

    std::ostringstream tim;
    tim << "distance,rei_median_s,rei_mad_s,mwpm_median_s,mwpm_mad_s,ratio\n";
    for (const auto& t : res.timings)
        tim << t.distance << "," << fmt_g(t.rei_median_s) << "," << fmt_g(t.rei_mad_s) << ","
            << fmt_g(t.mwpm_median_s) << "," << fmt_g(t.mwpm_mad_s) << "," << fmt_g(t.ratio) << "\n";

    ChartSeries ratio{"identify / decode", {}, {}};
    for (const auto& t : res.timings) {
        ratio.x.push_back(t.distance);
        ratio.y.push_back(t.ratio);
    }
    return emit_artifacts(cfg, "overhead",
                          {{"metrics.csv", csv.str()},
                           {"timings.csv", tim.str()},
                           {"chart.svg", svg_line_chart("Identification cost relative to matching",
                                                        "code distance", "median time ratio", {ratio})}});
}

// ---------------------------------------------------------------------------
// Scenario: multi-code chip. Four patches share one chip; a burst at a given
// locus degrades each patch according to its distance from the impact.
// Decodes with the first configured decoder.
// ---------------------------------------------------------------------------

struct MultiRow {
    std::string locus;
    std::string code;  // N, S, W, E
    int32_t bin;
    double time_s;
    double logical_error;
};

struct MultiResult {
    std::vector<MultiRow> rows;
    std::vector<BlockTiming> timings;
};

inline MultiResult compute_multi_code(const ScenarioConfig& cfg) {
    if (cfg.decoders.empty())
        throw std::runtime_error("multi-code: 'decoders' must name at least one decoder");
    MultiResult res;
    const int32_t d = cfg.distances.front();
    const int32_t r = cfg.rounds > 0 ? cfg.rounds : d;
    const double s = static_cast<double>(2 * d + 2);
    Chip chip = build_grid_chip(3 * d + 2, 3 * d + 2);
    const std::vector<std::pair<double, double>> offsets = {{s, 2 * s}, {s, 0.0}, {0.0, s}, {2 * s, s}};
    static const char* kCodeNames[4] = {"N", "S", "W", "E"};
    std::vector<CodePlacement> placements = multi_code_embed(chip, d, cfg.basis, offsets);

    std::vector<SurfaceCode> codes;
    for (int k = 0; k < 4; ++k) {
        SurfaceCode sc = build_rotated_surface_code(d, r, cfg.basis);
        apply_mapping(sc.circuit, chip, placements[static_cast<size_t>(k)].mapping);
        codes.push_back(std::move(sc));
    }
    // The decoding graph depends only on circuit structure and intrinsic
    // noise, not on chip coordinates, so the four patches share one.
    DetectorGraph graph = build_graph(codes[0].circuit, NoiseParams{cfg.p});
    MatchingContext ctx(graph);
    const double avg_min = device_avg_min_dist(chip);
    const DecoderKind decoder = cfg.decoders.front();
    const int32_t shots = shots_for(cfg, codes[0].circuit);
    const double T = codes[0].circuit.total_duration;

    for (const std::string& label : cfg.loci) {
        auto locus = resolve_multi_locus(label, d);
        uint64_t block_seed = derive_seed(cfg.seed, fnv1a64(label));
        const size_t n_cells = static_cast<size_t>(cfg.sequences) * 4u * static_cast<size_t>(shots);
        std::vector<uint8_t> err(n_cells, 0);

        auto t0 = std::chrono::steady_clock::now();
        for_each_sequence(cfg.sequences, cfg.threads, [&](int32_t sq) {
            for (int k = 0; k < 4; ++k) {
                const ScheduledCircuit& circ = codes[static_cast<size_t>(k)].circuit;
                std::vector<RadiationEvent> events;
                if (cfg.radiation) events.push_back(event_at(locus, cfg));
                FrameSampler sampler(circ, NoiseParams{cfg.p}, events,
                                     derive_seed(block_seed, static_cast<uint64_t>(sq) * 4u +
                                                                 static_cast<uint64_t>(k)));
                SyndromeWindow win = make_syndrome_window(circ, avg_min, cfg.k_max);
                const size_t base =
                    (static_cast<size_t>(sq) * 4u + static_cast<size_t>(k)) * static_cast<size_t>(shots);
                for (int32_t i = 0; i < shots; ++i) {
                    ShotResult shot = sampler.sample_shot(static_cast<double>(i) * T);
                    DecodeResult dec;
                    switch (decoder) {
                        case DecoderKind::Mwpm:
                            dec = mwpm_decode(ctx, shot.detection_events);
                            break;
                        case DecoderKind::UnionFind:
                            dec = union_find_decode(graph, shot.detection_events);
                            break;
                        case DecoderKind::RadMatching:
                            dec = radmatch_decode(ctx, win, shot.detection_events);
                            break;
                    }
                    err[base + static_cast<size_t>(i)] =
                        dec.predicted_observable_flip != shot.observable_flip;
                }
            }
        });
        auto t1 = std::chrono::steady_clock::now();
        res.timings.push_back({label, std::chrono::duration<double>(t1 - t0).count()});

        for (int k = 0; k < 4; ++k) {
            for (int32_t i = 0; i < shots; ++i) {
                double sum = 0.0;
                for (int32_t sq = 0; sq < cfg.sequences; ++sq)
                    sum += err[(static_cast<size_t>(sq) * 4u + static_cast<size_t>(k)) *
                                   static_cast<size_t>(shots) +
                               static_cast<size_t>(i)];
                res.rows.push_back(
                    {label, kCodeNames[k], i, static_cast<double>(i) * T, sum / cfg.sequences});
            }
        }
    }
    return res;
}

inline std::filesystem::path run_multi_code(const ScenarioConfig& cfg) {
    MultiResult res = compute_multi_code(cfg);
    std::ostringstream csv;
    csv << "locus,code,bin,time_s,logical_error\n";
    for (const auto& r : res.rows)
        csv << csv_field(r.locus) << "," << r.code << "," << r.bin << "," << fmt_g(r.time_s) << ","
            << fmt_g(r.logical_error) << "\n";

    std::ostringstream tim;
    tim << "block,wall_s\n";
    for (const auto& t : res.timings) tim << csv_field(t.block) << "," << fmt_g(t.wall_s) << "\n";

    std::vector<ChartSeries> series;
    for (const auto& r : res.rows) {
        std::string name = r.locus + " / " + r.code;
        if (series.empty() || series.back().name != name) series.push_back({name, {}, {}});
        series.back().x.push_back(r.time_s);
        series.back().y.push_back(r.logical_error);
    }
    return emit_artifacts(cfg, "multi-code",
                          {{"metrics.csv", csv.str()},
                           {"timings.csv", tim.str()},
                           {"chart.svg", svg_line_chart("Per-patch logical error rate over time",
                                                        "time (s)", "logical error rate", series)}});
}

// ---------------------------------------------------------------------------
// Scenario: decoder comparison. Every listed decoder sees the exact same
// shot stream (one sampler per sequence), so curves are paired sample by
// sample. detection_rate is only populated for radmatching.
// ---------------------------------------------------------------------------

struct CompareRow {
    DecoderKind decoder;
    int32_t bin;
    double time_s;
    double logical_error;
    double detection_rate;
};

struct CompareTiming {
    DecoderKind decoder;
    double mean_decode_s;
    double mean_rei_s;  // 0 for decoders without an identification step
};

struct CompareResult {
    std::vector<CompareRow> rows;
    std::vector<CompareTiming> timings;
    double shot_duration = 0.0;
};

inline CompareResult compute_decoder_comparison(const ScenarioConfig& cfg) {
    if (cfg.decoders.empty())
        throw std::runtime_error("decoder-compare: 'decoders' must name at least one decoder");
    CompareResult res;
    const int32_t d = cfg.distances.front();
    const int32_t r = cfg.rounds > 0 ? cfg.rounds : d;
    CodeBench bench = make_single_bench(d, r, cfg.basis);
    const ScheduledCircuit& circ = bench.code.circuit;
    auto locus = resolve_single_locus(cfg.loci.front(), d);
    DetectorGraph graph = build_graph(circ, NoiseParams{cfg.p});
    MatchingContext ctx(graph);
    const int32_t shots = shots_for(cfg, circ);
    const size_t nd = cfg.decoders.size();
    res.shot_duration = circ.total_duration;

    std::vector<RadiationEvent> events;
    if (cfg.radiation) events.push_back(event_at(locus, cfg));

    const size_t n_cells = static_cast<size_t>(cfg.sequences) * nd * static_cast<size_t>(shots);
    std::vector<uint8_t> err(n_cells, 0), hit(n_cells, 0);
    std::vector<double> dec_time(static_cast<size_t>(cfg.sequences) * nd, 0.0);
    std::vector<double> rei_time(static_cast<size_t>(cfg.sequences) * nd, 0.0);

    for_each_sequence(cfg.sequences, cfg.threads, [&](int32_t sq) {
        FrameSampler sampler(circ, NoiseParams{cfg.p}, events,
                             derive_seed(cfg.seed, static_cast<uint64_t>(sq)));
        std::vector<SyndromeWindow> wins;
        for (size_t k = 0; k < nd; ++k)
            wins.push_back(make_syndrome_window(circ, bench.avg_min_dist, cfg.k_max));
        for (int32_t i = 0; i < shots; ++i) {
            ShotResult shot = sampler.sample_shot(static_cast<double>(i) * circ.total_duration);
            for (size_t k = 0; k < nd; ++k) {
                const size_t cell =
                    (static_cast<size_t>(sq) * nd + k) * static_cast<size_t>(shots) +
                    static_cast<size_t>(i);
                DecodeResult dec;
                switch (cfg.decoders[k]) {
                    case DecoderKind::Mwpm:
                        dec = mwpm_decode(ctx, shot.detection_events);
                        break;
                    case DecoderKind::UnionFind:
                        dec = union_find_decode(graph, shot.detection_events);
                        break;
                    case DecoderKind::RadMatching: {
                        std::optional<Detection> det;
                        double rt = 0.0;
                        dec = radmatch_decode(ctx, wins[k], shot.detection_events, RadMatchConfig{},
                                              &det, &rt);
                        rei_time[static_cast<size_t>(sq) * nd + k] += rt;
                        if (det) hit[cell] = 1;
                        break;
                    }
                }
                err[cell] = dec.predicted_observable_flip != shot.observable_flip;
                dec_time[static_cast<size_t>(sq) * nd + k] += dec.decode_time;
            }
        }
    });

    for (size_t k = 0; k < nd; ++k) {
        for (int32_t i = 0; i < shots; ++i) {
            double esum = 0.0, hsum = 0.0;
            for (int32_t sq = 0; sq < cfg.sequences; ++sq) {
                const size_t cell = (static_cast<size_t>(sq) * nd + k) * static_cast<size_t>(shots) +
                                    static_cast<size_t>(i);
                esum += err[cell];
                hsum += hit[cell];
            }
            res.rows.push_back({cfg.decoders[k], i, static_cast<double>(i) * circ.total_duration,
                                esum / cfg.sequences, hsum / cfg.sequences});
        }
        double dsum = 0.0, rsum = 0.0;
        for (int32_t sq = 0; sq < cfg.sequences; ++sq) {
            dsum += dec_time[static_cast<size_t>(sq) * nd + k];
            rsum += rei_time[static_cast<size_t>(sq) * nd + k];
        }
        double n_calls = static_cast<double>(cfg.sequences) * shots;
        res.timings.push_back({cfg.decoders[k], dsum / n_calls, rsum / n_calls});
    }
    return res;
}

inline std::filesystem::path run_decoder_comparison(const ScenarioConfig& cfg) {
    CompareResult res = compute_decoder_comparison(cfg);
    std::ostringstream csv;
    csv << "decoder,bin,time_s,logical_error,detection_rate\n";
    for (const auto& r : res.rows)
        csv << decoder_name(r.decoder) << "," << r.bin << "," << fmt_g(r.time_s) << ","
            << fmt_g(r.logical_error) << "," << fmt_g(r.detection_rate) << "\n";

    std::ostringstream tim;
    tim << "decoder,mean_decode_s,mean_rei_s\n";
    for (const auto& t : res.timings)
        tim << decoder_name(t.decoder) << "," << fmt_g(t.mean_decode_s) << "," << fmt_g(t.mean_rei_s)
            << "\n";

    std::vector<ChartSeries> series;
    for (const auto& r : res.rows) {
        std::string name = decoder_name(r.decoder);
        if (series.empty() || series.back().name != name) series.push_back({name, {}, {}});
        series.back().x.push_back(r.time_s);
        series.back().y.push_back(r.logical_error);
    }
    return emit_artifacts(cfg, "decoder-compare",
                          {{"metrics.csv", csv.str()},
                           {"timings.csv", tim.str()},
                           {"chart.svg", svg_line_chart("Logical error rate under a burst", "time (s)",
                                                        "logical error rate", series)}});
}

// Per-scenario fallbacks used by the command-line runner.
inline ScenarioDefaults defaults_for(const std::string& scenario) {
    if (scenario == "distance-sweep") return {{5, 9, 13}, {"Central"}, {}, "Z", 128};
    if (scenario == "position-study") return {{15}, {"Central", "North-West", "West"}, {}, "Z", 64};
    if (scenario == "overhead") return {{5, 9, 13, 19}, {"Central"}, {}, "Z", 1};
    if (scenario == "multi-code") return {{11}, {"Central", "North", "North-East"}, {"union_find"}, "Z", 32};
    if (scenario == "decoder-compare") return {{9}, {"Central"}, {"mwpm", "radmatching"}, "Z", 128};
    throw std::runtime_error("unknown scenario '" + scenario + "'");
}

}  // namespace radqec
