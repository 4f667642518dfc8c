#include "hyperteam/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace hyperteam {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view s, long long& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

int checked_weight(long long w, std::string_view context) {
  if (w < 0) throw ParseError("negative weight in " + std::string(context));
  if (w > std::numeric_limits<int>::max()) throw ParseError("weight overflow in " + std::string(context));
  return static_cast<int>(w);
}

std::string json_id(const nlohmann::json& v, const char* what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(std::string("invalid ") + what + " id");
}

void require_nonempty_tasks(const std::vector<std::string>& task_ids, const Assignment& a) {
  for (Eigen::Index k = 0; k < a.cols(); ++k)
    if (a.col(k).maxCoeff() <= 0) throw ParseError("empty hyperedge: task '" + task_ids[k] + "'");
}

}  // namespace

InstanceFormat parse_format(std::string_view name) {
  if (name == "json" || name == "instance-json") return InstanceFormat::json;
  if (name == "edgelist" || name == "edge-list") return InstanceFormat::edge_list;
  throw std::invalid_argument("unknown instance format '" + std::string(name) + "'");
}

InstanceFormat guess_format(const std::filesystem::path& path) {
  return path.extension() == ".json" ? InstanceFormat::json : InstanceFormat::edge_list;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

ProblemInstance load_instance(const std::filesystem::path& path, InstanceFormat format) {
  const std::string text = read_file(path);
  if (format == InstanceFormat::edge_list) return parse_edge_list(text);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("parse error: ") + e.what());
  }
  return parse_instance_json(doc);
}

ProblemInstance parse_instance_json(const nlohmann::json& doc) {
  try {
    std::vector<std::string> agent_ids, task_ids;
    std::vector<int> budgets, energies;
    for (const auto& a : doc.at("agents")) {
      agent_ids.push_back(json_id(a.at("id"), "agent"));
      budgets.push_back(checked_weight(a.at("budget").get<long long>(), "agent budget"));
    }
    for (const auto& t : doc.at("tasks")) {
      task_ids.push_back(json_id(t.at("id"), "task"));
      energies.push_back(static_cast<int>(t.at("energy").get<long long>()));
    }
    std::map<std::string, int> agent_pos, task_pos;
    for (int i = 0; i < static_cast<int>(agent_ids.size()); ++i)
      if (!agent_pos.emplace(agent_ids[i], i).second)
        throw ParseError("duplicate agent id '" + agent_ids[i] + "'");
    for (int k = 0; k < static_cast<int>(task_ids.size()); ++k)
      if (!task_pos.emplace(task_ids[k], k).second)
        throw ParseError("duplicate task id '" + task_ids[k] + "'");

    Assignment a = Assignment::Zero(static_cast<Eigen::Index>(agent_ids.size()),
                                    static_cast<Eigen::Index>(task_ids.size()));
    for (const auto& e : doc.at("assignment")) {
      const auto agent = json_id(e.at("agent"), "agent");
      const auto task = json_id(e.at("task"), "task");
      auto ai = agent_pos.find(agent);
      auto ti = task_pos.find(task);
      if (ai == agent_pos.end()) throw ParseError("assignment references unknown agent '" + agent + "'");
      if (ti == task_pos.end()) throw ParseError("assignment references unknown task '" + task + "'");
      if (a(ai->second, ti->second) != 0)
        throw ParseError("duplicate assignment entry " + agent + "/" + task);
      a(ai->second, ti->second) = checked_weight(e.at("weight").get<long long>(), "assignment");
    }
    require_nonempty_tasks(task_ids, a);
    return ProblemInstance(std::move(agent_ids), std::move(budgets), std::move(task_ids),
                           std::move(energies), std::move(a));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("parse error: ") + e.what());
  }
}

ProblemInstance parse_edge_list(std::string_view text) {
  struct TaskLine {
    std::string id;
    long long energy = -1;
    std::vector<std::pair<int, int>> members;
  };
  std::vector<std::string> agent_ids;
  std::map<std::string, int, std::less<>> agent_pos;
  std::vector<TaskLine> tasks;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const auto raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto where = "line " + std::to_string(line_no);
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("parse error: missing ':' on " + where);
    TaskLine task;
    auto head = trim(line.substr(0, colon));
    if (!head.empty() && head.back() == ')') {
      const auto open = head.rfind('(');
      if (open == std::string_view::npos) throw ParseError("parse error: unbalanced '(' on " + where);
      if (!parse_int(head.substr(open + 1, head.size() - open - 2), task.energy))
        throw ParseError("parse error: bad task energy on " + where);
      head = trim(head.substr(0, open));
    }
    if (head.empty()) throw ParseError("parse error: empty task id on " + where);
    task.id = std::string(head);

    std::istringstream tokens{std::string(line.substr(colon + 1))};
    std::string tok;
    std::map<int, int> weights;
    while (tokens >> tok) {
      std::string_view id = tok;
      long long w = 1;
      const auto sep = tok.rfind(':');
      if (sep != std::string::npos) {
        if (!parse_int(std::string_view(tok).substr(sep + 1), w))
          throw ParseError("parse error: bad weight '" + tok + "' on " + where);
        id = std::string_view(tok).substr(0, sep);
      }
      const int weight = checked_weight(w, where);
      auto it = agent_pos.find(id);
      if (it == agent_pos.end()) {
        it = agent_pos.emplace(std::string(id), static_cast<int>(agent_ids.size())).first;
        agent_ids.emplace_back(id);
      }
      weights[it->second] += weight;
    }
    for (auto [agent, w] : weights)
      if (w > 0) task.members.emplace_back(agent, w);
    if (task.members.empty()) throw ParseError("empty hyperedge: task '" + task.id + "'");
    tasks.push_back(std::move(task));
  }
  if (tasks.empty()) throw ParseError("parse error: no tasks");

  Assignment a = Assignment::Zero(static_cast<Eigen::Index>(agent_ids.size()),
                                  static_cast<Eigen::Index>(tasks.size()));
  std::vector<std::string> task_ids;
  std::vector<int> energies;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    for (auto [agent, w] : tasks[k].members) a(agent, static_cast<Eigen::Index>(k)) = w;
    task_ids.push_back(tasks[k].id);
    energies.push_back(tasks[k].energy >= 0 ? static_cast<int>(tasks[k].energy)
                                             : a.col(static_cast<Eigen::Index>(k)).sum());
  }
  std::vector<int> budgets(agent_ids.size());
  for (std::size_t i = 0; i < agent_ids.size(); ++i) budgets[i] = a.row(static_cast<Eigen::Index>(i)).sum();
  return ProblemInstance(std::move(agent_ids), std::move(budgets), std::move(task_ids),
                         std::move(energies), std::move(a));
}

nlohmann::json instance_to_json(const ProblemInstance& inst) {
  nlohmann::json doc;
  auto& agents = doc["agents"] = nlohmann::json::array();
  for (int i = 0; i < inst.num_agents(); ++i)
    agents.push_back({{"id", inst.agent_ids()[i]}, {"budget", inst.budgets()[i]}});
  auto& tasks = doc["tasks"] = nlohmann::json::array();
  for (int k = 0; k < inst.num_tasks(); ++k)
    tasks.push_back({{"id", inst.task_ids()[k]}, {"energy", inst.energies()[k]}});
  auto& entries = doc["assignment"] = nlohmann::json::array();
  const auto& a = inst.assignment();
  for (int i = 0; i < inst.num_agents(); ++i)
    for (int k = 0; k < inst.num_tasks(); ++k)
      if (a(i, k) > 0)
        entries.push_back({{"agent", inst.agent_ids()[i]}, {"task", inst.task_ids()[k]}, {"weight", a(i, k)}});
  return doc;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
  add_row(header);
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (c) buffer_ += ',';
    buffer_ += cells[c];
  }
  buffer_ += '\n';
}

}  // namespace hyperteam
