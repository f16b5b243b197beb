#include "hybev/design.hpp"

#include "hybev/errors.hpp"

#include <algorithm>

namespace hybev {

std::size_t DesignMatrix::col(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        throw SchemaError("design has no column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - columns.begin());
}

bool DesignMatrix::has_col(std::string_view name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<std::string> DesignMatrix::subjects() const {
    std::vector<std::string> out;
    for (const auto& id : subject_of_row) {
        if (out.empty() || out.back() != id) {
            if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
        }
    }
    return out;
}

namespace {

void check_features(const PanelDataset& panel, const std::vector<std::string>& features) {
    if (features.empty()) throw UsageError("feature list is empty");
    for (const auto& trip : panel.trips) {
        for (const auto& f : features) {
            if (is_categorical_feature(f)) {
                const std::string* v = categorical_of(trip, f);
                if (v == nullptr || v->empty()) {
                    throw SchemaError("trip '" + trip.trip_id + "': categorical '" + f +
                                      "' missing");
                }
            } else if (channel_of(trip, f) == nullptr) {
                throw SchemaError("trip '" + trip.trip_id + "': channel '" + f + "' missing");
            }
        }
    }
}

} // namespace

DesignMatrix assemble_design(const PanelDataset& panel, const std::vector<std::string>& features,
                             const std::string& response) {
    panel.validate();
    check_features(panel, features);

    DesignMatrix d;
    d.features = features;

    // fit encoders over the whole training panel
    for (const auto& f : features) {
        if (!is_categorical_feature(f)) continue;
        std::vector<std::string> values;
        values.reserve(panel.trips.size());
        for (const auto& trip : panel.trips) values.push_back(*categorical_of(trip, f));
        d.encoders.push_back(OneHotEncoder::fit(f, values));
    }

    for (const auto& f : features) {
        if (is_categorical_feature(f)) {
            for (const auto& enc : d.encoders) {
                if (enc.name != f) continue;
                for (const auto& cname : enc.column_names()) d.columns.push_back(cname);
            }
        } else {
            d.columns.push_back(f);
        }
    }

    for (const auto& trip : panel.trips) {
        const Channel* resp = nullptr;
        if (!response.empty()) {
            resp = channel_of(trip, response);
            if (resp == nullptr) {
                throw SchemaError("trip '" + trip.trip_id + "': response channel '" + response +
                                  "' missing");
            }
        }
        for (std::size_t j = 0; j < trip.size(); ++j) {
            std::vector<double> row;
            row.reserve(d.columns.size());
            for (const auto& f : features) {
                if (is_categorical_feature(f)) {
                    for (const auto& enc : d.encoders) {
                        if (enc.name != f) continue;
                        const auto onehot = enc.encode(*categorical_of(trip, f));
                        row.insert(row.end(), onehot.begin(), onehot.end());
                    }
                } else {
                    row.push_back((*channel_of(trip, f))[j]);
                }
            }
            d.rows.push_back(std::move(row));
            d.subject_of_row.push_back(trip.trip_id);
            if (resp) d.response.push_back((*resp)[j]);
        }
    }
    return d;
}

DesignMatrix design_for_trip(const TripSeries& trip, const DesignMatrix& training,
                             const std::string& response_channel) {
    DesignMatrix d;
    d.columns = training.columns;
    d.features = training.features;
    d.encoders = training.encoders;

    const Channel* resp = nullptr;
    if (!response_channel.empty()) {
        resp = channel_of(trip, response_channel);
        if (resp == nullptr) {
            throw SchemaError("trip '" + trip.trip_id + "': response channel '" +
                              response_channel + "' missing");
        }
    }

    for (std::size_t j = 0; j < trip.size(); ++j) {
        std::vector<double> row;
        row.reserve(d.columns.size());
        for (const auto& f : d.features) {
            if (is_categorical_feature(f)) {
                const std::string* v = categorical_of(trip, f);
                for (const auto& enc : d.encoders) {
                    if (enc.name != f) continue;
                    bool unseen = false;
                    const auto onehot =
                        enc.encode(v == nullptr ? std::string() : *v, &unseen);
                    if (unseen) ++d.unseen_levels;
                    row.insert(row.end(), onehot.begin(), onehot.end());
                }
            } else {
                const Channel* c = channel_of(trip, f);
                if (c == nullptr) {
                    throw SchemaError("trip '" + trip.trip_id + "': channel '" + f + "' missing");
                }
                row.push_back((*c)[j]);
            }
        }
        d.rows.push_back(std::move(row));
        d.subject_of_row.push_back(trip.trip_id);
        if (resp) d.response.push_back((*resp)[j]);
    }
    return d;
}

} // namespace hybev
