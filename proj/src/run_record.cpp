#include "psgd/run_record.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace psgd {

std::string to_string(VelocityEvent e) {
  switch (e) {
    case VelocityEvent::kReflect:
      return "reflect";
    case VelocityEvent::kRefresh:
      return "refresh";
    case VelocityEvent::kSkipped:
      return "skipped";
  }
  return "unknown";
}

VelocityEvent velocity_event_from_string(const std::string& s) {
  if (s == "reflect") return VelocityEvent::kReflect;
  if (s == "refresh") return VelocityEvent::kRefresh;
  if (s == "skipped") return VelocityEvent::kSkipped;
  throw std::invalid_argument("unknown velocity event: " + s);
}

nlohmann::json vector_to_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void RunRecord::write_ndjson(std::ostream& out) const {
  const nlohmann::json header = {{"type", "header"},     {"algorithm", algorithm},
                                 {"config", config},     {"rng", rng_algorithm},
                                 {"seed", seed},         {"stream", stream},
                                 {"steps", total_steps}, {"stride", stride}};
  out << header.dump() << '\n';
  for (const auto& s : steps) {
    const nlohmann::json line = {{"k", s.k},
                                 {"theta", vector_to_json(s.theta)},
                                 {"v", vector_to_json(s.velocity)},
                                 {"eta", s.eta},
                                 {"batch", s.batch},
                                 {"grad_norm", s.grad_norm},
                                 {"event", to_string(s.event)}};
    out << line.dump() << '\n';
  }
  const nlohmann::json footer = {{"type", "final"},
                                 {"theta", vector_to_json(final_theta)},
                                 {"v", vector_to_json(final_velocity)}};
  out << footer.dump() << '\n';
}

std::optional<RunRecord> RunRecord::read_ndjson(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) break;
  }
  if (line.empty()) return std::nullopt;
  const auto header = nlohmann::json::parse(line);
  if (header.value("type", "") != "header") throw std::runtime_error("run record: expected header");
  RunRecord rec;
  rec.algorithm = header.at("algorithm").get<std::string>();
  rec.config = header.at("config");
  rec.rng_algorithm = header.at("rng").get<std::string>();
  rec.seed = header.at("seed").get<std::uint64_t>();
  rec.stream = header.at("stream").get<std::uint64_t>();
  rec.total_steps = header.at("steps").get<std::size_t>();
  rec.stride = header.at("stride").get<std::size_t>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (j.contains("type") && j.at("type") == "final") {
      rec.final_theta = vector_from_json(j.at("theta"));
      rec.final_velocity = vector_from_json(j.at("v"));
      return rec;
    }
    StepRecord s;
    s.k = j.at("k").get<std::size_t>();
    s.theta = vector_from_json(j.at("theta"));
    s.velocity = vector_from_json(j.at("v"));
    s.eta = j.at("eta").get<double>();
    s.batch = j.at("batch").get<std::vector<std::size_t>>();
    s.grad_norm = j.at("grad_norm").get<double>();
    s.event = velocity_event_from_string(j.at("event").get<std::string>());
    rec.steps.push_back(std::move(s));
  }
  throw std::runtime_error("run record: missing final-state line");
}

std::vector<RunRecord> RunRecord::read_all_ndjson(std::istream& in) {
  std::vector<RunRecord> out;
  while (auto rec = read_ndjson(in)) out.push_back(std::move(*rec));
  return out;
}

void RunRecord::write_csv(std::ostream& out) const {
  const auto d = final_theta.size();
  out << "k";
  for (Eigen::Index i = 0; i < d; ++i) out << ",theta" << i + 1;
  out << ",eta\n";
  for (const auto& s : steps) {
    out << s.k;
    for (Eigen::Index i = 0; i < s.theta.size(); ++i) out << ',' << nlohmann::json(s.theta[i]).dump();
    out << ',' << nlohmann::json(s.eta).dump() << '\n';
  }
}

std::size_t RunRecord::count(VelocityEvent e) const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [e](const StepRecord& s) { return s.event == e; }));
}

}  // namespace psgd
