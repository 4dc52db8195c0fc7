#pragma once

// Persistence boundary: run manifests, versioned CSV emitters, the d=2
// SVG figure, the binary event log, and the flat key=value config
// reader.  Every artifact embeds the manifest hash so files from
// different runs cannot be mixed silently.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shapelab/estimators.hpp"
#include "shapelab/observables.hpp"
#include "shapelab/properties.hpp"
#include "shapelab/simulator.hpp"

namespace shapelab {

inline constexpr const char* kArtifactVersion = "shapelab/1.0";

/// %.17g — round-trip exact for IEEE doubles.
std::string g17(double v);

std::uint64_t fnv1a64(const std::string& text);

/// Flat ordered key=value document.  The hash covers the serialized
/// body; the manifest_hash line itself is appended on write and
/// stripped on read.
class Manifest {
  public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value) { set(key, g17(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void set(const std::string& key, std::uint64_t value) {
        set(key, std::to_string(value));
    }
    std::optional<std::string> get(const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

    std::string serialize() const;  // body only, no hash line
    std::uint64_t hash() const { return fnv1a64(serialize()); }
    std::string hash_hex() const;

    void write(const std::string& path) const;
    static Manifest read(const std::string& path);

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Materializes the full config echo: spec fields, constants, mode,
/// schedule/grid when present, stream algorithm id, artifact version.
/// Keys match the CLI flag names, so a manifest is a valid config file.
Manifest make_manifest(const ProcessSpec& spec);

/// Inverse of make_manifest on the ProcessSpec fields; throws ConfigError
/// on missing or malformed keys.
ProcessSpec spec_from_manifest(const Manifest& m);

/// Runs one simulation and writes the full run directory: manifest,
/// front-record CSV over the default direction grid, direction table,
/// final-state summary, optional event log (skipped with a summary note
/// past 10^6 events).  Returns the written file names.
std::vector<std::string> write_simulation_run(const ProcessSpec& spec,
                                              const std::string& out_dir,
                                              bool event_log);

// --- CSV emitters ----------------------------------------------------------
// Each file opens with `# schema <name>/v1` and `# manifest <hex>` lines,
// then a fixed header row.  UTF-8, LF, floats in %.17g.

void write_front_csv(const std::string& path, const std::string& manifest_hex,
                     const std::vector<Direction>& dirs,
                     const std::vector<FrontRecord>& records);

void write_direction_csv(const std::string& path,
                         const std::string& manifest_hex,
                         const std::vector<Direction>& dirs);

void write_lambda_csv(const std::string& path, const std::string& manifest_hex,
                      const std::vector<LambdaEstimate>& estimates);

void write_property_csv(const std::string& path,
                        const std::string& manifest_hex,
                        const std::vector<PropertyReport>& reports);

/// Structured text: directions, lambdas, stderr, vertices (d <= 2),
/// manifest hash, per-replica seed list.
void write_shape_document(const std::string& path,
                          const std::string& manifest_hex,
                          const ShapeEstimate& shape,
                          const std::vector<LambdaEstimate>& estimates);

/// d=2 figure: the estimated polygon plus a scaled point cloud (e.g.
/// B-tilde(t)/t).  Throws DimensionUnsupported otherwise.
void write_shape_svg(const std::string& path, const std::string& manifest_hex,
                     const ShapeEstimate& shape,
                     const std::vector<Vec>& point_cloud);

// --- Binary event log ------------------------------------------------------
// Little-endian.  Header: magic "SHLBLOG1", u32 version, u32 d,
// u64 spec hash, u32 id length, stream algorithm id bytes.  Records:
// f64 time, u64 ordinal, i32 x d from, i32 x d to.

struct EventLog {
    int d = 0;
    std::uint64_t spec_hash = 0;
    std::string stream_algo_id;
    std::vector<JumpEvent> events;
};

void write_event_log(const std::string& path, int d, std::uint64_t spec_hash,
                     const std::vector<JumpEvent>& events);
EventLog read_event_log(const std::string& path);

// --- Config files ----------------------------------------------------------

/// Flat key=value text; '#' starts a comment; blank lines ignored.
/// Throws ConfigError on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_config(const std::string& path);

}  // namespace shapelab
