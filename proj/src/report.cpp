#include "pathparse/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pathparse {

using nlohmann::json;

std::string format_double(double value) {
    if (std::isnan(value)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

json to_json(const ProbabilityReport& r) {
    json j = {
        {"schema", "pathparse.probability/1"},
        {"joint", r.joint},
        {"amplitude", {{"re", r.amplitude.real()}, {"im", r.amplitude.imag()}}},
        {"pair_sum", r.pair_sum},
        {"path_count", r.path_count},
        {"notes", r.notes},
    };
    if (!r.conditional.empty()) {
        json rows = json::array();
        for (const ConditionalEntry& e : r.conditional) {
            rows.push_back({{"site", e.site},
                            {"position", e.position},
                            {"joint", e.joint},
                            {"probability", e.probability}});
        }
        j["conditional"] = std::move(rows);
    }
    return j;
}

json to_json(const Partition& p) {
    json sets = json::array();
    for (const PathSet& s : p.sets) {
        sets.push_back({{"members", s.members},
                        {"set_cos", s.set_cos},
                        {"set_sin", s.set_sin},
                        {"probability", s.probability},
                        {"residual", s.residual},
                        {"classification", to_string(s.classification)}});
    }
    return {
        {"mode", to_string(p.mode)},
        {"strict_valid", p.strict_valid},
        {"relaxed_valid", p.relaxed_valid},
        {"epsilon_X", p.epsilon_X},
        {"epsilon_F", p.epsilon_F},
        {"total_probability", p.total_probability},
        {"global_residual", p.global_residual},
        {"set_count", p.sets.size()},
        {"sets", std::move(sets)},
    };
}

json to_json(const ParsingResult& r) {
    return {
        {"partition", to_json(r.partition)},
        {"finer_than_trivial", r.finer_than_trivial},
        {"maximal_coherence", r.maximal_coherence},
        {"trace",
         {{"strategy", to_string(r.trace.strategy)},
          {"moves_tried", r.trace.moves_tried},
          {"moves_accepted", r.trace.moves_accepted},
          {"candidates_examined", r.trace.candidates_examined},
          {"chains", r.trace.chains},
          {"selected_seed", r.trace.selected_seed},
          {"fell_back", r.trace.fell_back}}},
    };
}

json to_json(const FieldHistory& f) {
    json cells = json::array();
    for (int k = 0; k < f.num_slices; ++k) {
        for (int x = 0; x < f.num_sites; ++x) {
            if (!f.occupied(k, x)) continue;
            const std::size_t i = f.index(k, x);
            json cell = {{"slice", k},
                         {"site", x},
                         {"count", f.counts[i]},
                         {"amplitude", f.amplitude[i]},
                         {"phase", f.phase(k, x)}};
            if (!std::isnan(f.gradient_in[i])) cell["gradient_in"] = f.gradient_in[i];
            if (!std::isnan(f.gradient_out[i])) cell["gradient_out"] = f.gradient_out[i];
            cells.push_back(std::move(cell));
        }
    }
    return {
        {"schema", "pathparse.field/1"},
        {"num_slices", f.num_slices},
        {"num_sites", f.num_sites},
        {"members", f.source_members},
        {"probability", f.probability},
        {"coherence", f.coherence},
        {"anomaly", f.anomaly},
        {"cells", std::move(cells)},
    };
}

json to_json(const PhaseFrontReport& r) {
    json sites = json::array();
    for (const SiteDeviation& s : r.sites) {
        sites.push_back({{"slice", s.slice},
                         {"site", s.site},
                         {"deviation", s.deviation},
                         {"slope_jump", s.slope_jump},
                         {"discontinuity", s.discontinuity}});
    }
    return {
        {"max_deviation", r.max_deviation},
        {"locus_max_deviation", r.locus_max_deviation},
        {"max_slope_jump", r.max_slope_jump},
        {"locus_slices", r.locus_slices},
        {"sites", std::move(sites)},
    };
}

json to_json(const GroupReport& g) {
    json j = {
        {"label", g.label},
        {"members", g.set.members},
        {"probability", g.set.probability},
        {"residual", g.set.residual},
        {"anomaly", g.anomaly},
    };
    if (g.field) j["coherence"] = g.field->coherence;
    if (g.fronts) j["phase_fronts"] = to_json(*g.fronts);
    return j;
}

json to_json(const ScenarioReport& r) {
    json groups = json::array();
    for (const GroupReport& g : r.geometric_groups) groups.push_back(to_json(g));
    json sets = json::array();
    for (const GroupReport& g : r.parsing_sets) sets.push_back(to_json(g));
    json j = {
        {"schema", "pathparse.scenario/1"},
        {"kind", to_string(r.kind)},
        {"target_site", r.target_site},
        {"probability", to_json(r.probability)},
        {"parsing", to_json(r.parsing)},
        {"parsing_sets", std::move(sets)},
        {"notes", r.notes},
    };
    if (r.geometric_partition) {
        j["geometric_grouping"] = {{"partition", to_json(*r.geometric_partition)},
                                   {"groups", std::move(groups)}};
    }
    if (r.double_slit) {
        const DoubleSlitMetrics& m = *r.double_slit;
        const SlitPurityReport& p = m.purity;
        j["double_slit"] = {
            {"target_site", m.target_site},
            {"joint_both", m.joint_both},
            {"joint_single", m.joint_single},
            {"constructive_ratio", m.constructive_ratio},
            {"slit_purity",
             {{"evaluated", p.evaluated},
              {"note", p.note},
              {"near_ensembles", p.near_ensembles},
              {"near_fine_partitions", p.near_fine_partitions},
              {"near_all_slit_pure", p.near_all_slit_pure},
              {"far_valid_partitions", p.far_valid_partitions},
              {"far_fine_partitions", p.far_fine_partitions},
              {"far_slit_pure_fine_exists", p.far_slit_pure_fine_exists},
              {"far_slit_family_residual", p.far_slit_family_residual},
              {"far_slit_family_valid", p.far_slit_family_valid}}},
        };
    }
    if (r.triple_slit) {
        j["triple_slit"] = {{"max_abs_parameter", r.triple_slit->max_abs_parameter},
                            {"sites", r.triple_slit->rows.size()}};
    }
    return j;
}

std::string conditional_csv(const std::vector<ConditionalEntry>& rows) {
    std::ostringstream out;
    out << "site_index,position,probability\n";
    for (const ConditionalEntry& e : rows) {
        out << e.site << ',' << format_double(e.position) << ',' << format_double(e.probability) << '\n';
    }
    return out.str();
}

std::string fringe_csv(const std::vector<ConditionalEntry>& rows) {
    std::ostringstream out;
    out << "site,position,probability\n";
    for (const ConditionalEntry& e : rows) {
        out << e.site << ',' << format_double(e.position) << ',' << format_double(e.probability) << '\n';
    }
    return out.str();
}

std::string field_csv(const FieldHistory& f, const PhaseFrontReport* fronts) {
    std::vector<const SiteDeviation*> by_site(f.counts.size(), nullptr);
    if (fronts) {
        for (const SiteDeviation& s : fronts->sites) by_site[f.index(s.slice, s.site)] = &s;
    }
    std::ostringstream out;
    out << "slice,site,count,amplitude,phase";
    if (fronts) out << ",slope_jump,discontinuity";
    out << '\n';
    for (int k = 0; k < f.num_slices; ++k) {
        for (int x = 0; x < f.num_sites; ++x) {
            const std::size_t i = f.index(k, x);
            out << k << ',' << x << ',' << f.counts[i] << ',' << format_double(f.amplitude[i]) << ','
                << format_double(f.phase(k, x));
            if (fronts) {
                const SiteDeviation* s = by_site[i];
                out << ',' << (s ? format_double(s->slope_jump) : "") << ','
                    << (s && s->discontinuity ? 1 : 0);
            }
            out << '\n';
        }
    }
    return out.str();
}

std::string sorkin_csv(const TripleSlitMetrics& m) {
    std::ostringstream out;
    out << "site,position";
    for (std::string_view label : kSorkinLabels) out << ',' << label;
    out << ",sorkin_parameter,max_abs_parameter\n";
    for (const SorkinRow& row : m.rows) {
        out << row.site << ',' << format_double(row.position);
        for (double v : row.intensities) out << ',' << format_double(v);
        out << ',' << format_double(row.parameter) << ',' << format_double(m.max_abs_parameter) << '\n';
    }
    return out.str();
}

}  // namespace pathparse
