#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "logfolio/errors.hpp"
#include "logfolio/types.hpp"

namespace logfolio {

// Daily price history of one instrument. Dates strictly increasing,
// prices strictly positive (logs are taken downstream).
struct PriceSeries {
    InstrumentId id;
    std::vector<Date> dates;
    Series prices;

    std::size_t size() const { return dates.size(); }
    bool empty() const { return dates.empty(); }
};

// Dense date-aligned price matrix: rows follow `dates`, columns follow `ids`.
// Every cell is a positive price carried over verbatim from its source series.
struct AlignedPanel {
    std::vector<InstrumentId> ids;
    std::vector<Date> dates;
    Eigen::MatrixXd values;  // dates x ids

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return ids.size(); }

    Series column(std::size_t j) const {
        Series out(rows());
        for (std::size_t i = 0; i < rows(); ++i) out[i] = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        return out;
    }
};

// One quarterly top-holdings disclosure. Disclosed weights are carried for
// reporting only; the algorithms always re-estimate weights.
struct HoldingsRecord {
    InstrumentId fund;
    Date as_of;
    std::vector<InstrumentId> holdings;
    std::optional<std::vector<double>> disclosed_weights;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string token;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(token);
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    fields.push_back(token);
    return fields;
}

inline bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

[[noreturn]] inline void malformed(std::size_t line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace detail

// Parses the price CSV schema `code,date,price`. Returns one series per
// distinct code, in order of first appearance, each sorted by date.
inline std::vector<PriceSeries> load_price_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!detail::read_line(in, line) || line != "code,date,price") {
        detail::malformed(1, "expected header 'code,date,price'");
    }

    std::vector<PriceSeries> series;
    std::map<std::string, std::size_t> index_of;
    std::vector<std::vector<std::pair<Date, double>>> rows;

    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 3) detail::malformed(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
        if (fields[0].empty()) detail::malformed(line_no, "empty instrument code");
        const auto date = Date::try_parse(fields[1]);
        if (!date) detail::malformed(line_no, "invalid date '" + fields[1] + "'");
        const auto price = parse_double(fields[2]);
        if (!price || !std::isfinite(*price)) detail::malformed(line_no, "invalid price '" + fields[2] + "'");
        if (*price <= 0.0) detail::malformed(line_no, "non-positive price '" + fields[2] + "' for " + fields[0]);

        auto [it, inserted] = index_of.try_emplace(fields[0], series.size());
        if (inserted) {
            series.push_back(PriceSeries{InstrumentId{fields[0]}, {}, {}});
            rows.emplace_back();
        }
        rows[it->second].emplace_back(*date, *price);
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        auto& obs = rows[s];
        std::stable_sort(obs.begin(), obs.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < obs.size(); ++i) {
            if (obs[i].first == obs[i - 1].first) {
                throw ParseError("duplicate observation for (" + series[s].id.code + ", " +
                                 obs[i].first.iso + ")");
            }
        }
        series[s].dates.reserve(obs.size());
        series[s].prices.reserve(obs.size());
        for (auto& [d, p] : obs) {
            series[s].dates.push_back(std::move(d));
            series[s].prices.push_back(p);
        }
    }
    return series;
}

// Writes the same schema back out. Prices use shortest round-trip decimal
// text, so load(write(s)) reproduces every double bit-for-bit.
inline void write_price_csv(std::ostream& out, const std::vector<PriceSeries>& series) {
    out << "code,date,price\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << s.id.code << ',' << s.dates[i].iso << ',' << format_double(s.prices[i]) << '\n';
        }
    }
}

// Parses the holdings schema `fund,as_of,holding,weight` (weight cell may be
// empty). All rows must agree on fund and as_of.
inline HoldingsRecord load_holdings(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!detail::read_line(in, line) || line != "fund,as_of,holding,weight") {
        detail::malformed(1, "expected header 'fund,as_of,holding,weight'");
    }

    HoldingsRecord record;
    std::vector<double> weights;
    bool first_row = true;
    bool has_weights = false;

    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 4) detail::malformed(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
        if (fields[0].empty()) detail::malformed(line_no, "empty fund code");
        if (fields[2].empty()) detail::malformed(line_no, "empty holding code");
        const auto as_of = Date::try_parse(fields[1]);
        if (!as_of) detail::malformed(line_no, "invalid date '" + fields[1] + "'");

        if (first_row) {
            record.fund = InstrumentId{fields[0]};
            record.as_of = *as_of;
            has_weights = !fields[3].empty();
            first_row = false;
        } else {
            if (fields[0] != record.fund.code) detail::malformed(line_no, "fund code changed mid-file");
            if (as_of->iso != record.as_of.iso) detail::malformed(line_no, "as_of date changed mid-file");
            if (has_weights != !fields[3].empty()) {
                detail::malformed(line_no, "weight column must be filled for all rows or none");
            }
        }

        for (const auto& h : record.holdings) {
            if (h.code == fields[2]) detail::malformed(line_no, "duplicate holding '" + fields[2] + "'");
        }
        record.holdings.push_back(InstrumentId{fields[2]});

        if (has_weights) {
            const auto w = parse_double(fields[3]);
            if (!w || !std::isfinite(*w)) detail::malformed(line_no, "invalid weight '" + fields[3] + "'");
            if (*w < 0.0 || *w > 1.0) detail::malformed(line_no, "weight " + fields[3] + " outside [0,1]");
            weights.push_back(*w);
        }
    }

    if (record.holdings.empty()) throw ParseError("empty holdings list");
    if (has_weights) record.disclosed_weights = std::move(weights);
    return record;
}

// Inner join on dates: keeps exactly the dates present in every series.
// Column order follows input order. Forward-filling is deliberately not
// offered; a missing date drops the whole row.
inline AlignedPanel align(const std::vector<PriceSeries>& series) {
    if (series.empty()) throw PreconditionError("align requires at least one series");
    for (const auto& s : series) {
        if (s.empty()) throw PreconditionError("align: series '" + s.id.code + "' is empty");
    }

    std::vector<Date> common = series.front().dates;
    for (std::size_t s = 1; s < series.size() && !common.empty(); ++s) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), series[s].dates.begin(),
                              series[s].dates.end(), std::back_inserter(next));
        common = std::move(next);
    }

    if (common.size() < 2) {
        std::string ranges;
        for (const auto& s : series) {
            if (!ranges.empty()) ranges += ", ";
            ranges += s.id.code + ": " + s.dates.front().iso + ".." + s.dates.back().iso;
        }
        if (common.empty()) {
            throw PreconditionError("align: no common dates across series (" + ranges + ")");
        }
        throw PreconditionError("align: only 1 common date; need at least 2 (" + ranges + ")");
    }

    AlignedPanel panel;
    panel.dates = common;
    panel.values.resize(static_cast<Eigen::Index>(common.size()),
                        static_cast<Eigen::Index>(series.size()));
    for (std::size_t s = 0; s < series.size(); ++s) {
        panel.ids.push_back(series[s].id);
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < common.size(); ++i) {
            while (series[s].dates[cursor] < common[i]) ++cursor;
            panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) =
                series[s].prices[cursor];
        }
    }
    return panel;
}

// Keeps observations with from <= date <= to (either bound optional).
inline PriceSeries filter_by_date(const PriceSeries& s, const std::optional<Date>& from,
                                  const std::optional<Date>& to) {
    PriceSeries out;
    out.id = s.id;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (from && s.dates[i] < *from) continue;
        if (to && *to < s.dates[i]) continue;
        out.dates.push_back(s.dates[i]);
        out.prices.push_back(s.prices[i]);
    }
    return out;
}

inline std::vector<PriceSeries> filter_by_date(const std::vector<PriceSeries>& series,
                                               const std::optional<Date>& from,
                                               const std::optional<Date>& to) {
    std::vector<PriceSeries> out;
    out.reserve(series.size());
    for (const auto& s : series) out.push_back(filter_by_date(s, from, to));
    return out;
}

// Splits a panel back into per-instrument series (used to re-align and by
// the align idempotence property).
inline std::vector<PriceSeries> panel_to_series(const AlignedPanel& panel) {
    std::vector<PriceSeries> out;
    out.reserve(panel.cols());
    for (std::size_t j = 0; j < panel.cols(); ++j) {
        out.push_back(PriceSeries{panel.ids[j], panel.dates, panel.column(j)});
    }
    return out;
}

inline const PriceSeries* find_series(const std::vector<PriceSeries>& series,
                                      const InstrumentId& id) {
    for (const auto& s : series) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

}  // namespace logfolio
