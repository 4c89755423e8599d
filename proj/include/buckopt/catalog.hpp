#pragma once

// Discrete component catalogs for the design search: every realizable
// inductance maps to a (core, turns) pair and every realizable capacitance
// to a series/parallel bank of stock capacitors. Built tables are immutable
// and safe to share across threads.

#include "buckopt/common.hpp"

#include <string>
#include <utility>
#include <vector>

namespace buckopt {

/// Toroidal core: geometry in mm/mm2/cm3, A_L in nH per squared turn.
struct CoreRecord {
    std::string name;
    double od_mm = 0.0;     ///< outer diameter
    double id_mm = 0.0;     ///< inner diameter
    double h_mm = 0.0;      ///< height
    double ae_mm2 = 0.0;    ///< effective magnetic cross-section
    double vol_cm3 = 0.0;   ///< boxed volume
    double al_nh = 0.0;     ///< nominal inductance, nH/turn^2
    double mu_i = 0.0;      ///< initial relative permeability
    double b_sat = 0.0;     ///< saturation flux density, T
    // Material loss coefficients, P/Ve = k * f^alpha * dB^beta (W/m^3).
    double steinmetz_k = 0.25;
    double steinmetz_alpha = 1.5;
    double steinmetz_beta = 2.0;

    void validate() const;
};

/// Round winding wire: cross-section in mm2, resistance per meter.
struct WireSpec {
    std::string name = "round 1.0 mm Cu";
    double area_mm2 = 0.7854;
    double ohm_per_m = 0.02195;

    void validate() const;
};

/// One realizable inductance choice.
struct InductorEntry {
    double l_uh = 0.0;    ///< exactly al_nh * turns^2 / 1000
    CoreRecord core;      ///< owning copy; entries stay valid on their own
    int turns = 0;
    double r_ohm = 0.0;   ///< DC winding resistance
    double vol_cm3 = 0.0; ///< equals core.vol_cm3
};

/// Stock capacitor (electrolytic family): value, size, loss factors.
struct CapacitorRecord {
    double c_uf = 0.0;
    double vol_cm3 = 0.0;
    double tan_delta = 0.0;  ///< dissipation factor
    double k_esl = 0.0;      ///< ESL factor, H*F (unit ESL = k_esl / C)

    void validate() const;
};

/// How a capacitor bank is wired from stock parts. Groups hold indices into
/// the catalog's capacitor list. ParallelOfSeries: each group is a series
/// string, strings paralleled. SeriesOfParallel: each group is a parallel
/// block, blocks chained in series.
struct CapConnection {
    enum class Topology { ParallelOfSeries, SeriesOfParallel };
    Topology topology = Topology::ParallelOfSeries;
    std::vector<std::vector<int>> groups;
};

/// One realizable capacitance choice (minimal-volume wiring for its value).
struct CapBankEntry {
    double c_eff_uf = 0.0;
    CapConnection connection;
    int count = 0;             ///< total components used
    double vol_cm3 = 0.0;
    double esl_factor = 0.0;   ///< bank ESL = esl_factor / C_eff (SI)
    double tan_delta_eff = 0.0;///< bank ESR = tan_delta_eff / (2*pi*fs*C_eff)
};

/// Maximum turns that fit the core window at fill factor ku (nearest-integer).
[[nodiscard]] int n_max(const CoreRecord& core, const WireSpec& wire, double ku);

/// Largest inductance the core reaches with n turns, in uH.
[[nodiscard]] double l_max_uh(const CoreRecord& core, int n);

/// DC resistance of an n-turn winding, in ohm.
[[nodiscard]] double winding_resistance(const CoreRecord& core, int n, const WireSpec& wire);

/// Enumerates all realizable inductances in [l_min_uh, l_max_uh]. Each value
/// is realized on the smallest-volume core that can reach it; result sorted
/// strictly ascending. Throws CatalogError when the range selects nothing.
[[nodiscard]] std::vector<InductorEntry> build_inductor_table(
    const std::vector<CoreRecord>& cores, const WireSpec& wire, double ku,
    double l_min_uh, double l_max_uh);

/// Enumerates capacitor banks up to mp total components (singles, parallel,
/// series, and one level of mixed wiring), keeps the minimal-volume wiring
/// per value (values closer than merge_tol relative count as equal), filters
/// to [c_min_uf, c_max_uf], sorts ascending.
[[nodiscard]] std::vector<CapBankEntry> build_capacitor_table(
    const std::vector<CapacitorRecord>& caps, int mp,
    double c_min_uf, double c_max_uf, double merge_tol = 1e-3);

/// ESR/ESL of a bank at switching frequency fs (Hz); returns ohms and henry.
[[nodiscard]] std::pair<double, double> cap_parasitics(const CapBankEntry& entry, double fs_hz);

/// Effective capacitance of a wiring over the given stock list, in uF.
/// Exposed so tests can recompute entries independently of the table builder.
[[nodiscard]] double connection_capacitance_uf(const CapConnection& conn,
                                               const std::vector<CapacitorRecord>& caps);

/// Closest entry by value; ties resolve to the smaller value.
[[nodiscard]] const InductorEntry& nearest_entry(const std::vector<InductorEntry>& table, double l_uh);
[[nodiscard]] const CapBankEntry& nearest_entry(const std::vector<CapBankEntry>& table, double c_uf);

/// Component definitions plus the two generated lookup tables.
struct Catalog {
    std::vector<CoreRecord> cores;
    std::vector<CapacitorRecord> capacitors;
    WireSpec wire;
    double ku = 0.35;
    int mp = 5;
    std::vector<InductorEntry> inductors;
    std::vector<CapBankEntry> banks;

    /// Builds both tables for the given parameter ranges (uH / uF).
    void build(double l_min_uh, double l_max_uh, double c_min_uf, double c_max_uf);
};

/// Reads component definitions (cores, capacitors, wire, Ku, MP) from TOML.
[[nodiscard]] Catalog load_catalog_definition(const std::string& path);

/// Catalog JSON round-trip; file carries `"schema": 1`.
void save_catalog(const Catalog& catalog, const std::string& path);
[[nodiscard]] Catalog load_catalog(const std::string& path);

}  // namespace buckopt
