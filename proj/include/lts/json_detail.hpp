#ifndef LTS_JSON_DETAIL_HPP
#define LTS_JSON_DETAIL_HPP

#include <json.hpp>

#include "lts/series.hpp"

namespace lts::detail {

// {"re","im","logs"?} merged into t
nlohmann::json coeff_json(const Coeff& c, nlohmann::json t = nlohmann::json::object());
Coeff parse_coeff(const nlohmann::json& t, Mode mode);
nlohmann::json series_json(const TransSeries& f);

} // namespace lts::detail

#endif
