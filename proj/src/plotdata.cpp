#include "sdsim/plotdata.hpp"

#include "sdsim/sim_engine.hpp"

#include <json.hpp>

#include <cstdio>
#include <optional>
#include <vector>

namespace sdsim {

namespace {

struct Row {
  const char* series;
  double t;
  double x;
  double y;
};

std::string format_row(const Row& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g\n", r.series, r.t, r.x, r.y);
  return buf;
}

double number_field(const nlohmann::json& j, const char* key, int line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw LogFormatError(line, std::string("missing numeric field '") + key + "'");
  return it->get<double>();
}

}  // namespace

std::string plotdata_csv(std::string_view jsonl) {
  std::vector<Row> rows;
  std::optional<Row> visitee;
  double last_t = -1.0;

  int line = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    const std::size_t end = std::min(jsonl.find('\n', pos), jsonl.size());
    const std::string_view text = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    nlohmann::json ev;
    try {
      ev = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw LogFormatError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!ev.is_object()) throw LogFormatError(line, "event must be a JSON object");
    const double t = number_field(ev, "t", line);
    if (t < last_t) throw LogFormatError(line, "events out of time order");
    last_t = t;
    auto kind_it = ev.find("kind");
    if (kind_it == ev.end() || !kind_it->is_string()) throw LogFormatError(line, "missing 'kind'");
    const auto kind = parse_event_kind(kind_it->get<std::string>());
    if (!kind) throw LogFormatError(line, "unknown event kind '" + kind_it->get<std::string>() + "'");

    if (!visitee && ev.contains("visitee_x")) {
      visitee = Row{"visitee", 0.0, number_field(ev, "visitee_x", line), number_field(ev, "visitee_y", line)};
    }
    switch (*kind) {
      case EventKind::Scan:
      case EventKind::Call: {
        const double x = number_field(ev, "x", line);
        const double y = number_field(ev, "y", line);
        rows.push_back({"trajectory", t, x, y});
        rows.push_back({"scan", t, x, y});
        break;
      }
      case EventKind::WalkLeg:
      case EventKind::Contact:
      case EventKind::Timeout:
        rows.push_back({"trajectory", t, number_field(ev, "x", line), number_field(ev, "y", line)});
        break;
      default:
        break;
    }
  }

  std::string out = "series,t,x,y\n";
  if (visitee) out += format_row(*visitee);
  for (const auto& r : rows) out += format_row(r);
  return out;
}

}  // namespace sdsim
