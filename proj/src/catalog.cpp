#include "buckopt/catalog.hpp"

#include "buckopt/toml.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace buckopt {

using nlohmann::json;

void CoreRecord::validate() const {
    if (!(od_mm > id_mm && id_mm > 0.0))
        throw CatalogError("core '" + name + "': need OD > ID > 0");
    if (!(h_mm > 0.0) || !(ae_mm2 > 0.0) || !(vol_cm3 > 0.0) || !(al_nh > 0.0))
        throw CatalogError("core '" + name + "': H, Ae, Vol and A_L must be positive");
}

void WireSpec::validate() const {
    if (!(area_mm2 > 0.0) || !(ohm_per_m > 0.0))
        throw CatalogError("wire '" + name + "': area and resistance must be positive");
}

void CapacitorRecord::validate() const {
    if (!(c_uf > 0.0) || !(vol_cm3 > 0.0))
        throw CatalogError("capacitor: C and volume must be positive");
    if (tan_delta < 0.0 || k_esl < 0.0)
        throw CatalogError("capacitor: tan_delta and k_esl must be non-negative");
}

int n_max(const CoreRecord& core, const WireSpec& wire, double ku) {
    core.validate();
    wire.validate();
    if (!(ku > 0.0 && ku <= 1.0)) throw CatalogError("fill factor must be in (0, 1]");
    double turns = ku * std::numbers::pi * core.id_mm * core.id_mm / (4.0 * wire.area_mm2);
    return static_cast<int>(std::lround(turns));
}

double l_max_uh(const CoreRecord& core, int n) {
    if (n < 1) throw CatalogError("turn count must be >= 1");
    return core.al_nh * static_cast<double>(n) * static_cast<double>(n) / 1000.0;
}

double winding_resistance(const CoreRecord& core, int n, const WireSpec& wire) {
    if (n < 1) throw CatalogError("turn count must be >= 1");
    double turn_len_m = (core.od_mm - core.id_mm + 2.0 * core.h_mm) * 1e-3;
    return static_cast<double>(n) * turn_len_m * wire.ohm_per_m;
}

namespace {

struct RankedCore {
    const CoreRecord* core;
    int max_turns;
    double max_l_uh;
};

// Smallest-volume core able to reach l_uh; ties by reach, then input order.
const RankedCore* select_core(const std::vector<RankedCore>& ranked, double l_uh) {
    const RankedCore* best = nullptr;
    for (const auto& rc : ranked) {
        if (rc.max_l_uh < l_uh) continue;
        if (!best || rc.core->vol_cm3 < best->core->vol_cm3 ||
            (rc.core->vol_cm3 == best->core->vol_cm3 && rc.max_l_uh < best->max_l_uh))
            best = &rc;
    }
    return best;
}

}  // namespace

std::vector<InductorEntry> build_inductor_table(const std::vector<CoreRecord>& cores,
                                                const WireSpec& wire, double ku,
                                                double l_min_uh, double l_max_uh_limit) {
    if (cores.empty()) throw CatalogError("inductor table: no cores given");
    if (!(l_min_uh < l_max_uh_limit)) throw CatalogError("inductor table: bad L range");

    std::vector<RankedCore> ranked;
    ranked.reserve(cores.size());
    for (const auto& core : cores) {
        int nm = n_max(core, wire, ku);
        if (nm < 1) throw CatalogError("core '" + core.name + "': window fits no turns");
        ranked.push_back({&core, nm, l_max_uh(core, nm)});
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const RankedCore& a, const RankedCore& b) { return a.max_l_uh < b.max_l_uh; });

    std::vector<InductorEntry> table;
    for (const auto& rc : ranked) {
        for (int n = 1; n <= rc.max_turns; ++n) {
            double l = l_max_uh(*rc.core, n);
            if (l < l_min_uh || l > l_max_uh_limit) continue;
            // Keep the value only when this core is the designated one for it.
            if (select_core(ranked, l) != &rc) continue;
            InductorEntry e;
            e.l_uh = l;
            e.core = *rc.core;
            e.turns = n;
            e.r_ohm = winding_resistance(*rc.core, n, wire);
            e.vol_cm3 = rc.core->vol_cm3;
            table.push_back(std::move(e));
        }
    }
    if (table.empty()) throw CatalogError("inductor table: range selects no entries");
    std::sort(table.begin(), table.end(),
              [](const InductorEntry& a, const InductorEntry& b) { return a.l_uh < b.l_uh; });
    for (std::size_t i = 1; i < table.size(); ++i)
        if (!(table[i - 1].l_uh < table[i].l_uh))
            throw CatalogError("inductor table: duplicate inductance value");
    return table;
}

namespace {

// Aggregated electrical view of one wiring: capacitance in farad plus the
// impedance-like loss factors (per-unit value / C). "rho" carries tan_delta,
// "esl" carries the unit ESL; both add in series and combine reciprocally in
// parallel, exactly like resistance and inductance.
struct BankAggregate {
    double c_farad = 0.0;
    double rho = 0.0;  // -> tan_delta_eff = rho * c_farad
    double esl = 0.0;  // -> esl_factor    = esl * c_farad
};

BankAggregate series_of(const std::vector<BankAggregate>& parts) {
    double inv_c = 0.0, rho = 0.0, esl = 0.0;
    for (const auto& p : parts) {
        inv_c += 1.0 / p.c_farad;
        rho += p.rho;
        esl += p.esl;
    }
    return {1.0 / inv_c, rho, esl};
}

BankAggregate parallel_of(const std::vector<BankAggregate>& parts) {
    double c = 0.0, inv_rho = 0.0, inv_esl = 0.0;
    bool zero_rho = false, zero_esl = false;
    for (const auto& p : parts) {
        c += p.c_farad;
        if (p.rho > 0.0) inv_rho += 1.0 / p.rho; else zero_rho = true;
        if (p.esl > 0.0) inv_esl += 1.0 / p.esl; else zero_esl = true;
    }
    return {c, zero_rho ? 0.0 : 1.0 / inv_rho, zero_esl ? 0.0 : 1.0 / inv_esl};
}

BankAggregate unit_aggregate(const CapacitorRecord& cap) {
    double c = cap.c_uf * 1e-6;
    return {c, cap.tan_delta / c, cap.k_esl / c};
}

BankAggregate evaluate_connection(const CapConnection& conn,
                                  const std::vector<CapacitorRecord>& caps) {
    std::vector<BankAggregate> groups;
    groups.reserve(conn.groups.size());
    for (const auto& g : conn.groups) {
        std::vector<BankAggregate> units;
        units.reserve(g.size());
        for (int idx : g) units.push_back(unit_aggregate(caps.at(static_cast<std::size_t>(idx))));
        // Inner level is the opposite composition of the outer one.
        groups.push_back(conn.topology == CapConnection::Topology::ParallelOfSeries
                             ? series_of(units)
                             : parallel_of(units));
    }
    return conn.topology == CapConnection::Topology::ParallelOfSeries ? parallel_of(groups)
                                                                      : series_of(groups);
}

CapBankEntry make_entry(const CapConnection& conn, const std::vector<CapacitorRecord>& caps) {
    BankAggregate agg = evaluate_connection(conn, caps);
    CapBankEntry e;
    e.c_eff_uf = agg.c_farad * 1e6;
    e.connection = conn;
    e.count = 0;
    e.vol_cm3 = 0.0;
    for (const auto& g : conn.groups)
        for (int idx : g) {
            e.count += 1;
            e.vol_cm3 += caps[static_cast<std::size_t>(idx)].vol_cm3;
        }
    e.esl_factor = agg.esl * agg.c_farad;
    e.tan_delta_eff = agg.rho * agg.c_farad;
    return e;
}

// Multisets of capacitor indices of size 1..max_size, as sorted vectors.
std::vector<std::vector<int>> enumerate_multisets(int n_caps, int max_size) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (!cur.empty()) out.push_back(cur);
        if (static_cast<int>(cur.size()) == max_size) return;
        for (int i = start; i < n_caps; ++i) {
            cur.push_back(i);
            self(self, i);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace

double connection_capacitance_uf(const CapConnection& conn,
                                 const std::vector<CapacitorRecord>& caps) {
    if (conn.groups.empty()) throw CatalogError("capacitor connection has no groups");
    return evaluate_connection(conn, caps).c_farad * 1e6;
}

std::vector<CapBankEntry> build_capacitor_table(const std::vector<CapacitorRecord>& caps, int mp,
                                                double c_min_uf, double c_max_uf,
                                                double merge_tol) {
    if (caps.empty()) throw CatalogError("capacitor table: no capacitors given");
    if (mp < 1) throw CatalogError("capacitor table: MP must be >= 1");
    if (!(c_min_uf < c_max_uf)) throw CatalogError("capacitor table: bad C range");
    for (const auto& c : caps) c.validate();

    const int n = static_cast<int>(caps.size());
    std::vector<CapBankEntry> candidates;

    // Parallel-of-series covers singles, pure parallel (all strings length 1),
    // pure series (one string) and mixed banks of paralleled strings.
    auto strings = enumerate_multisets(n, mp);
    {
        CapConnection conn;
        conn.topology = CapConnection::Topology::ParallelOfSeries;
        auto rec = [&](auto&& self, std::size_t start, int budget) -> void {
            if (!conn.groups.empty()) candidates.push_back(make_entry(conn, caps));
            for (std::size_t s = start; s < strings.size(); ++s) {
                int sz = static_cast<int>(strings[s].size());
                if (sz > budget) continue;
                conn.groups.push_back(strings[s]);
                self(self, s, budget - sz);
                conn.groups.pop_back();
            }
        };
        rec(rec, 0, mp);
    }

    // Series-of-parallel adds the values the dual shape cannot reach, e.g. a
    // parallel block chained with a single. Skip shapes already covered above
    // (single block = parallel; all blocks single = series string).
    if (mp >= 3) {
        auto blocks = enumerate_multisets(n, mp - 1);
        CapConnection conn;
        conn.topology = CapConnection::Topology::SeriesOfParallel;
        auto rec = [&](auto&& self, std::size_t start, int budget, bool has_wide) -> void {
            if (conn.groups.size() >= 2 && has_wide) candidates.push_back(make_entry(conn, caps));
            for (std::size_t b = start; b < blocks.size(); ++b) {
                int sz = static_cast<int>(blocks[b].size());
                if (sz > budget) continue;
                conn.groups.push_back(blocks[b]);
                self(self, b, budget - sz, has_wide || sz >= 2);
                conn.groups.pop_back();
            }
        };
        rec(rec, 0, mp, false);
    }

    std::erase_if(candidates, [&](const CapBankEntry& e) {
        return e.c_eff_uf < c_min_uf || e.c_eff_uf > c_max_uf;
    });
    if (candidates.empty()) throw CatalogError("capacitor table: range selects no entries");

    std::sort(candidates.begin(), candidates.end(), [](const CapBankEntry& a, const CapBankEntry& b) {
        if (a.c_eff_uf != b.c_eff_uf) return a.c_eff_uf < b.c_eff_uf;
        if (a.vol_cm3 != b.vol_cm3) return a.vol_cm3 < b.vol_cm3;
        return a.count < b.count;
    });

    // Values within merge_tol of a cluster's first member count as the same
    // capacitance; the smallest-volume wiring represents the cluster.
    std::vector<CapBankEntry> table;
    std::size_t i = 0;
    while (i < candidates.size()) {
        double anchor = candidates[i].c_eff_uf;
        std::size_t best = i;
        std::size_t j = i + 1;
        while (j < candidates.size() && candidates[j].c_eff_uf <= anchor * (1.0 + merge_tol)) {
            const auto& cand = candidates[j];
            const auto& cur = candidates[best];
            if (cand.vol_cm3 < cur.vol_cm3 ||
                (cand.vol_cm3 == cur.vol_cm3 && cand.count < cur.count))
                best = j;
            ++j;
        }
        table.push_back(candidates[best]);
        i = j;
    }
    for (std::size_t k = 1; k < table.size(); ++k)
        if (!(table[k - 1].c_eff_uf < table[k].c_eff_uf))
            throw CatalogError("capacitor table: duplicate capacitance after merge");
    return table;
}

std::pair<double, double> cap_parasitics(const CapBankEntry& entry, double fs_hz) {
    if (!(fs_hz > 0.0)) throw SimError("cap_parasitics: fs must be positive");
    double c_farad = entry.c_eff_uf * 1e-6;
    if (!(c_farad > 0.0)) throw SimError("cap_parasitics: C_eff must be positive");
    double esr = entry.tan_delta_eff / (2.0 * std::numbers::pi * fs_hz * c_farad);
    double esl = entry.esl_factor / c_farad;
    return {esr, esl};
}

namespace {

template <typename Entry, typename ValueOf>
const Entry& nearest_impl(const std::vector<Entry>& table, double value, ValueOf value_of) {
    if (table.empty()) throw CatalogError("nearest_entry: table is empty");
    const Entry* best = &table.front();
    double best_dist = std::abs(value_of(*best) - value);
    for (const auto& e : table) {
        double d = std::abs(value_of(e) - value);
        // Strict < keeps the smaller value on ties (table is ascending).
        if (d < best_dist) {
            best = &e;
            best_dist = d;
        }
    }
    return *best;
}

}  // namespace

const InductorEntry& nearest_entry(const std::vector<InductorEntry>& table, double l_uh) {
    return nearest_impl(table, l_uh, [](const InductorEntry& e) { return e.l_uh; });
}

const CapBankEntry& nearest_entry(const std::vector<CapBankEntry>& table, double c_uf) {
    return nearest_impl(table, c_uf, [](const CapBankEntry& e) { return e.c_eff_uf; });
}

void Catalog::build(double l_min_uh, double l_max_uh, double c_min_uf, double c_max_uf) {
    inductors = build_inductor_table(cores, wire, ku, l_min_uh, l_max_uh);
    banks = build_capacitor_table(capacitors, mp, c_min_uf, c_max_uf);
}

Catalog load_catalog_definition(const std::string& path) {
    toml::Table root = toml::parse_file(path);
    Catalog cat;
    cat.ku = root.get_double_or("Ku", 0.35);
    cat.mp = static_cast<int>(root.get_int_or("MP", 5));
    if (root.contains("wire")) {
        const auto& w = root.get_table("wire");
        cat.wire.name = w.get_string_or("name", cat.wire.name);
        cat.wire.area_mm2 = w.get_double_or("area_mm2", cat.wire.area_mm2);
        cat.wire.ohm_per_m = w.get_double_or("ohm_per_m", cat.wire.ohm_per_m);
    }
    cat.wire.validate();
    if (!root.contains("cores")) throw FormatError(path + ": no [[cores]] blocks");
    for (const toml::Table* t : root.get_table_array("cores")) {
        CoreRecord c;
        c.name = t->get_string("name");
        c.od_mm = t->get_double("od_mm");
        c.id_mm = t->get_double("id_mm");
        c.h_mm = t->get_double("h_mm");
        c.ae_mm2 = t->get_double("ae_mm2");
        c.vol_cm3 = t->get_double("vol_cm3");
        c.al_nh = t->get_double("al_nh");
        c.mu_i = t->get_double_or("mu_i", 0.0);
        c.b_sat = t->get_double_or("b_sat", 1.0);
        c.steinmetz_k = t->get_double_or("steinmetz_k", c.steinmetz_k);
        c.steinmetz_alpha = t->get_double_or("steinmetz_alpha", c.steinmetz_alpha);
        c.steinmetz_beta = t->get_double_or("steinmetz_beta", c.steinmetz_beta);
        c.validate();
        cat.cores.push_back(std::move(c));
    }
    if (!root.contains("capacitors")) throw FormatError(path + ": no [[capacitors]] blocks");
    for (const toml::Table* t : root.get_table_array("capacitors")) {
        CapacitorRecord c;
        c.c_uf = t->get_double("c_uf");
        c.vol_cm3 = t->get_double("vol_cm3");
        c.tan_delta = t->get_double("tan_delta");
        c.k_esl = t->get_double("k_esl");
        c.validate();
        cat.capacitors.push_back(c);
    }
    return cat;
}

namespace {

json core_to_json(const CoreRecord& c) {
    return json{{"name", c.name},           {"od_mm", c.od_mm},
                {"id_mm", c.id_mm},         {"h_mm", c.h_mm},
                {"ae_mm2", c.ae_mm2},       {"vol_cm3", c.vol_cm3},
                {"al_nh", c.al_nh},         {"mu_i", c.mu_i},
                {"b_sat", c.b_sat},         {"steinmetz_k", c.steinmetz_k},
                {"steinmetz_alpha", c.steinmetz_alpha},
                {"steinmetz_beta", c.steinmetz_beta}};
}

CoreRecord core_from_json(const json& j) {
    CoreRecord c;
    c.name = j.at("name").get<std::string>();
    c.od_mm = j.at("od_mm").get<double>();
    c.id_mm = j.at("id_mm").get<double>();
    c.h_mm = j.at("h_mm").get<double>();
    c.ae_mm2 = j.at("ae_mm2").get<double>();
    c.vol_cm3 = j.at("vol_cm3").get<double>();
    c.al_nh = j.at("al_nh").get<double>();
    c.mu_i = j.at("mu_i").get<double>();
    c.b_sat = j.at("b_sat").get<double>();
    c.steinmetz_k = j.at("steinmetz_k").get<double>();
    c.steinmetz_alpha = j.at("steinmetz_alpha").get<double>();
    c.steinmetz_beta = j.at("steinmetz_beta").get<double>();
    return c;
}

}  // namespace

void save_catalog(const Catalog& catalog, const std::string& path) {
    json j;
    j["schema"] = 1;
    j["ku"] = catalog.ku;
    j["mp"] = catalog.mp;
    j["wire"] = {{"name", catalog.wire.name},
                 {"area_mm2", catalog.wire.area_mm2},
                 {"ohm_per_m", catalog.wire.ohm_per_m}};
    j["cores"] = json::array();
    for (const auto& c : catalog.cores) j["cores"].push_back(core_to_json(c));
    j["capacitors"] = json::array();
    for (const auto& c : catalog.capacitors)
        j["capacitors"].push_back(json{{"c_uf", c.c_uf},
                                       {"vol_cm3", c.vol_cm3},
                                       {"tan_delta", c.tan_delta},
                                       {"k_esl", c.k_esl}});
    j["inductor_table"] = json::array();
    for (const auto& e : catalog.inductors)
        j["inductor_table"].push_back(json{{"l_uh", e.l_uh},
                                           {"core", e.core.name},
                                           {"turns", e.turns},
                                           {"r_ohm", e.r_ohm},
                                           {"vol_cm3", e.vol_cm3}});
    j["capacitor_table"] = json::array();
    for (const auto& e : catalog.banks) {
        json groups = json::array();
        for (const auto& g : e.connection.groups) groups.push_back(g);
        j["capacitor_table"].push_back(
            json{{"c_eff_uf", e.c_eff_uf},
                 {"topology", e.connection.topology == CapConnection::Topology::ParallelOfSeries
                                  ? "parallel_of_series"
                                  : "series_of_parallel"},
                 {"groups", std::move(groups)},
                 {"count", e.count},
                 {"vol_cm3", e.vol_cm3},
                 {"esl_factor", e.esl_factor},
                 {"tan_delta_eff", e.tan_delta_eff}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << j.dump(2) << '\n';
}

Catalog load_catalog(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    if (!j.contains("schema") || j.at("schema").get<int>() != 1)
        throw FormatError(path + ": unsupported catalog schema");
    Catalog cat;
    try {
        cat.ku = j.at("ku").get<double>();
        cat.mp = j.at("mp").get<int>();
        cat.wire.name = j.at("wire").at("name").get<std::string>();
        cat.wire.area_mm2 = j.at("wire").at("area_mm2").get<double>();
        cat.wire.ohm_per_m = j.at("wire").at("ohm_per_m").get<double>();
        for (const auto& cj : j.at("cores")) cat.cores.push_back(core_from_json(cj));
        for (const auto& cj : j.at("capacitors")) {
            CapacitorRecord c;
            c.c_uf = cj.at("c_uf").get<double>();
            c.vol_cm3 = cj.at("vol_cm3").get<double>();
            c.tan_delta = cj.at("tan_delta").get<double>();
            c.k_esl = cj.at("k_esl").get<double>();
            cat.capacitors.push_back(c);
        }
        for (const auto& ej : j.at("inductor_table")) {
            InductorEntry e;
            e.l_uh = ej.at("l_uh").get<double>();
            auto core_name = ej.at("core").get<std::string>();
            auto it = std::find_if(cat.cores.begin(), cat.cores.end(),
                                   [&](const CoreRecord& c) { return c.name == core_name; });
            if (it == cat.cores.end())
                throw FormatError(path + ": inductor entry references unknown core " + core_name);
            e.core = *it;
            e.turns = ej.at("turns").get<int>();
            e.r_ohm = ej.at("r_ohm").get<double>();
            e.vol_cm3 = ej.at("vol_cm3").get<double>();
            cat.inductors.push_back(std::move(e));
        }
        for (const auto& ej : j.at("capacitor_table")) {
            CapBankEntry e;
            e.c_eff_uf = ej.at("c_eff_uf").get<double>();
            e.connection.topology = ej.at("topology").get<std::string>() == "parallel_of_series"
                                        ? CapConnection::Topology::ParallelOfSeries
                                        : CapConnection::Topology::SeriesOfParallel;
            for (const auto& gj : ej.at("groups"))
                e.connection.groups.push_back(gj.get<std::vector<int>>());
            e.count = ej.at("count").get<int>();
            e.vol_cm3 = ej.at("vol_cm3").get<double>();
            e.esl_factor = ej.at("esl_factor").get<double>();
            e.tan_delta_eff = ej.at("tan_delta_eff").get<double>();
            cat.banks.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return cat;
}

}  // namespace buckopt
