// SPDX-License-Identifier: Apache-2.0
//
// File ingestion and persistence for traces and sweep campaigns.
//
// Trace CSV: header `k,x,y,z` (optionally `,z2`); one sample per row; k is a
// non-negative integer index increasing by 1. Values are serialized with 17
// significant digits so save/load round-trips are bit-exact.
//
// Sweep directory: one `pos_<NNNN>.csv` per position, NNNN = eavesdropper
// distance in millimeters (zero-padded to 4 digits on write), plus a
// `meta.toml` sidecar of key = value lines carrying campaign metadata.

#pragma once

#include <filesystem>

#include "keyrate/trace.hpp"

namespace keyrate {

enum class TraceFormat { csv };

// Campaign metadata stored next to the position files.
struct SweepMeta {
    double wavelength_m = 0.125;
    double ab_distance_m = 5.0;
    double sampling_interval_s = 0.1;
    std::size_t samples_per_step = 0;
    double step_size_m = 0.0;
};

// Parses a `meta.toml` sidecar. Unknown keys are ignored; malformed lines
// throw ParseError with the line number.
SweepMeta load_meta(const std::filesystem::path& path);
void save_meta(const SweepMeta& meta, const std::filesystem::path& path);

// Loads one trace CSV. The result has variant=original and provenance set to
// the source path. If a `meta.toml` sits next to the file its wavelength,
// geometry, and sampling interval are applied; if the file name matches the
// sweep position pattern, eve_distance is recovered from it.
// Throws IoError (missing file), ParseError (bad header/row, with line
// number), EmptyInputError (no data rows).
TraceSet load_trace(const std::filesystem::path& path, TraceFormat format = TraceFormat::csv);

// Writes one trace CSV (17-significant-digit decimals; z2 column present only
// when the trace carries a secondary eavesdropper channel).
void save_trace(const TraceSet& trace, const std::filesystem::path& path,
                TraceFormat format = TraceFormat::csv);

// Loads a sweep directory: every `pos_<mm>.csv` plus optional `meta.toml`.
// Positions are sorted by parsed distance regardless of filesystem
// enumeration order. Throws EmptyInputError if no position files match,
// ParseError on duplicate distances.
SweepDataset load_sweep(const std::filesystem::path& directory);

// Writes a sweep directory (creates it if needed): one position CSV per
// TraceSet plus `meta.toml`. Throws IoError if two positions round to the
// same millimeter file name or the directory is unwritable.
void save_sweep(const SweepDataset& sweep, const std::filesystem::path& directory);

}  // namespace keyrate
