#include "liveprof/session.hpp"

#include "eval.hpp"
#include "liveprof/dsl/parser.hpp"

#include <algorithm>

namespace liveprof {

std::string temp_output_name(std::uint64_t epoch) { return "Output of statement " + std::to_string(epoch); }

Table mutate_cast(const Table& table, std::string_view column, CastTarget target, CastMode mode) {
    const Column& src = table.column(column);
    std::vector<Column> cols = table.columns();
    for (auto& c : cols) {
        if (c.name != column) continue;
        c.values = detail::cast_cells(src.values, src.stype, target, mode);
        c.stype = target == CastTarget::integer ? SemanticType::integer
                  : target == CastTarget::float_ ? SemanticType::float_
                                                 : SemanticType::temporal;
    }
    return Table(table.name(), std::move(cols));
}

Session::Session(std::filesystem::path base_dir, CsvOptions csv)
    : base_dir_(std::move(base_dir)), csv_(std::move(csv)) {}

ExecResult Session::execute(std::string_view source) {
    ExecResult result;
    result.epoch = ++epoch_;

    std::map<std::string, Fingerprint> before;
    for (const auto& [name, b] : env_) before.emplace(name, b.fingerprint);

    if (temp_) {
        result.removed.push_back(temp_->name);
        pinned_.erase(temp_->name);
        temp_.reset();
    }

    try {
        const dsl::Program program = dsl::parse(source);
        for (const auto& st : program.statements) {
            run_statement(st, result);
            ++result.statements_completed;
        }
    } catch (const Error& e) {
        result.ok = false;
        ExecError err{e.kind(), e.what(), e.span(), std::nullopt};
        if (const auto* cast = dynamic_cast<const CastError*>(&e)) err.row = cast->row();
        result.error = std::move(err);
    }

    for (auto& [name, b] : env_) {
        auto it = before.find(name);
        if (it == before.end() || it->second != b.fingerprint) {
            b.last_epoch = epoch_;
            result.changed.push_back(name);
        }
    }
    if (temp_) result.changed.push_back(temp_->name);
    std::sort(result.changed.begin(), result.changed.end());
    return result;
}

void Session::run_statement(const dsl::Statement& st, ExecResult& result) {
    const detail::TableLookup lookup = [this](std::string_view name) { return find(name); };

    const auto bind = [&](const std::string& name, TablePtr table) {
        if (table->name() != name) table = std::make_shared<const Table>(table->renamed(name));
        auto& slot = env_[name];
        const Fingerprint fp = fingerprint(*table);
        slot.table = std::move(table);
        slot.fingerprint = fp;
    };

    if (const auto* load = std::get_if<dsl::Load>(&st.node)) {
        std::filesystem::path path(load->path);
        if (path.is_relative()) path = base_dir_ / path;
        try {
            bind(load->target.name, std::make_shared<const Table>(read_csv(path, csv_, load->target.name)));
        } catch (Error& e) {
            if (e.span().line == 0) e.set_span(st.span);
            throw;
        }
    } else if (const auto* assign = std::get_if<dsl::Assign>(&st.node)) {
        bind(assign->target.name, detail::eval_table(*assign->value, lookup));
    } else if (const auto* expr = std::get_if<dsl::ExprStatement>(&st.node)) {
        TablePtr value = detail::eval_table(*expr->value, lookup);
        TempOutput out;
        out.name = temp_output_name(epoch_);
        out.binding.table = std::make_shared<const Table>(value->renamed(out.name));
        out.binding.fingerprint = fingerprint(*out.binding.table);
        out.binding.last_epoch = epoch_;
        temp_ = std::move(out);
    } else if (const auto* plot = std::get_if<dsl::Plot>(&st.node)) {
        const TablePtr table = find(plot->table.name);
        if (!table) throw NameError(plot->table.name, plot->table.span);
        const Column* col = table->find(plot->column.name);
        if (!col) throw NameError(plot->column.name, plot->column.span);
        const bool fits = (plot->kind == dsl::PlotKind::histogram && is_numeric(col->stype)) ||
                          (plot->kind == dsl::PlotKind::timeline && col->stype == SemanticType::temporal) ||
                          (plot->kind == dsl::PlotKind::topk && (col->stype == SemanticType::categorical ||
                                                                 col->stype == SemanticType::boolean));
        if (!fits) {
            throw TypeError("cannot plot " + std::string(to_string(col->stype)) + " column '" + col->name +
                                "' as " + std::string(dsl::to_string(plot->kind)),
                            st.span);
        }
        result.plots.push_back({plot->table.name, plot->column.name, plot->kind});
    }
}

std::vector<std::string> Session::reset() {
    ++epoch_;
    std::vector<std::string> names;
    for (const auto& [name, b] : env_) names.push_back(name);
    if (temp_) names.push_back(temp_->name);
    std::sort(names.begin(), names.end());
    env_.clear();
    temp_.reset();
    pinned_.clear();
    return names;
}

void Session::pin(const std::string& name, bool pinned) {
    if (!find(name)) throw NameError(name);
    if (pinned) {
        pinned_.insert(name);
    } else {
        pinned_.erase(name);
    }
}

std::vector<TableEntry> Session::tables() const {
    std::vector<TableEntry> out;
    out.reserve(env_.size() + 1);
    for (const auto& [name, b] : env_) out.push_back({name, b.table, b.fingerprint, b.last_epoch, false});
    if (temp_) {
        out.push_back({temp_->name, temp_->binding.table, temp_->binding.fingerprint, temp_->binding.last_epoch, true});
    }
    return out;
}

TablePtr Session::find(std::string_view name) const {
    if (auto it = env_.find(std::string(name)); it != env_.end()) return it->second.table;
    if (temp_ && temp_->name == name) return temp_->binding.table;
    return nullptr;
}

}  // namespace liveprof
