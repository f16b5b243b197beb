#include "hybev/encode.hpp"

#include "hybev/errors.hpp"

#include <algorithm>
#include <set>

namespace hybev {

OneHotEncoder OneHotEncoder::fit(std::string name, const std::vector<std::string>& values) {
    std::set<std::string> levels;
    for (const auto& v : values) {
        if (!v.empty()) levels.insert(v);
    }
    if (levels.empty()) {
        throw DataError("categorical '" + name + "' has no non-missing value");
    }
    OneHotEncoder enc;
    enc.name = std::move(name);
    enc.levels.assign(levels.begin(), levels.end());
    return enc;
}

std::vector<double> OneHotEncoder::encode(const std::string& value, bool* unseen) const {
    std::vector<double> out(levels.size(), 0.0);
    const auto it = std::lower_bound(levels.begin(), levels.end(), value);
    if (it != levels.end() && *it == value) {
        out[static_cast<std::size_t>(it - levels.begin())] = 1.0;
        if (unseen) *unseen = false;
    } else if (unseen) {
        *unseen = true;
    }
    return out;
}

std::vector<std::string> OneHotEncoder::column_names() const {
    std::vector<std::string> names;
    names.reserve(levels.size());
    for (const auto& level : levels) names.push_back(name + "_" + level);
    return names;
}

} // namespace hybev
