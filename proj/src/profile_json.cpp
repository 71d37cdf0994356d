#include "liveprof/profile_json.hpp"

namespace liveprof {

namespace {

Json timestamp_json(const std::optional<Timestamp>& t) {
    if (!t) return nullptr;
    return t->epoch_ms;
}

Json numeric_summary_json(const NumericSummary& s) {
    Json j;
    j["empty"] = s.empty;
    j["n_nonnull"] = s.n_nonnull;
    // Order statistics of an all-null column are undefined, not zero.
    const auto stat = [&](double v) { return s.empty ? Json(nullptr) : Json(v); };
    j["min"] = stat(s.min);
    j["q1"] = stat(s.q1);
    j["median"] = stat(s.median);
    j["q3"] = stat(s.q3);
    j["max"] = stat(s.max);
    j["mean"] = stat(s.mean);
    j["std"] = stat(s.std);
    j["n_pos"] = s.n_pos;
    j["n_zero"] = s.n_zero;
    j["n_neg"] = s.n_neg;
    j["sortedness"] = to_string(s.sortedness);
    j["outliers_sigma"] = s.outliers_sigma;
    j["outliers_iqr"] = s.outliers_iqr;
    return j;
}

Json categorical_summary_json(const CategoricalSummary& s) {
    Json top = Json::array();
    for (const auto& vc : s.top_values) {
        Json e;
        e["value"] = vc.value;
        e["count"] = vc.count;
        top.push_back(std::move(e));
    }
    Json j;
    j["cardinality"] = s.cardinality;
    j["top_values"] = std::move(top);
    j["n_null"] = s.n_null;
    j["duplicate_rows"] = s.duplicate_rows;
    j["is_unique"] = s.is_unique;
    j["strlen_min"] = s.strlen_min;
    j["strlen_mean"] = s.strlen_mean;
    j["strlen_max"] = s.strlen_max;
    return j;
}

}  // namespace

Json to_json(const Histogram& h) {
    Json j;
    j["bin_edges"] = h.bin_edges;
    j["counts"] = h.counts;
    j["n_null"] = h.n_null;
    return j;
}

Json to_json(const ColumnProfile& p) {
    Json j;
    j["name"] = p.name;
    j["stype"] = to_string(p.stype);
    j["null_fraction"] = p.null_fraction;
    j["n_null"] = p.n_null;
    if (const auto* num = std::get_if<NumericProfile>(&p.body)) {
        j["kind"] = "numeric";
        j["histogram"] = to_json(num->histogram);
        j["summary"] = numeric_summary_json(num->summary);
    } else if (const auto* cat = std::get_if<CategoricalSummary>(&p.body)) {
        j["kind"] = "categorical";
        j["summary"] = categorical_summary_json(*cat);
    } else {
        const auto& tmp = std::get<TemporalSummary>(p.body);
        j["kind"] = "temporal";
        j["histogram"] = to_json(tmp.histogram);
        Json s;
        s["n_nonnull"] = tmp.n_nonnull;
        s["t_min"] = timestamp_json(tmp.t_min);
        s["t_max"] = timestamp_json(tmp.t_max);
        s["sortedness"] = to_string(tmp.sortedness);
        j["summary"] = std::move(s);
    }
    return j;
}

Json to_json(const TableProfile& p) {
    Json fp;
    fp["hash"] = p.fingerprint.hex();
    fp["nrows"] = p.fingerprint.nrows;
    fp["ncols"] = p.fingerprint.ncols;

    Json cols = Json::array();
    for (const auto& c : p.columns) cols.push_back(to_json(c));

    Json j;
    j["table_name"] = p.table_name;
    j["nrows"] = p.nrows;
    j["ncols"] = p.ncols;
    j["epoch"] = p.epoch;
    j["fingerprint"] = std::move(fp);
    j["temporary"] = p.temporary;
    j["columns"] = std::move(cols);
    return j;
}

Json profiles_message(std::uint64_t epoch, std::span<const std::string> order, std::span<const Json> profiles) {
    Json j;
    j["type"] = "profiles";
    j["epoch"] = epoch;
    j["order"] = Json::array();
    for (const auto& name : order) j["order"].push_back(name);
    j["profiles"] = Json::array();
    for (const auto& p : profiles) j["profiles"].push_back(p);
    return j;
}

std::string dump_canonical(const Json& j) {
    return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

}  // namespace liveprof
