#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabsniper/errors.hpp"
#include "tabsniper/taxonomy.hpp"
#include "tabsniper/text.hpp"

namespace tabsniper {

/// Which text a classifier was trained on.
enum class NbVariant { Header, Caption, HeaderCaption };

constexpr std::string_view to_string(NbVariant v) {
  switch (v) {
    case NbVariant::Header: return "Header";
    case NbVariant::Caption: return "Caption";
    case NbVariant::HeaderCaption: return "HeaderCaption";
  }
  return "?";
}

inline std::optional<NbVariant> nb_variant_from_string(std::string_view s) {
  for (auto v : {NbVariant::Header, NbVariant::Caption, NbVariant::HeaderCaption})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

/// Multinomial naive Bayes over token counts.
struct NbModel {
  NbVariant variant = NbVariant::HeaderCaption;
  std::vector<TableCategory> classes;
  std::map<std::string, std::size_t> vocab;
  std::vector<std::size_t> class_doc_counts;
  /// class_token_counts[c][token index]
  std::vector<std::vector<std::size_t>> class_token_counts;
  double alpha = 1.0;

  friend bool operator==(const NbModel&, const NbModel&) = default;
};

struct NbSample {
  std::vector<std::string> tokens;
  TableCategory category;
};

/// Train with Laplace/Lidstone smoothing `alpha`. Every class in `classes`
/// needs at least one sample; samples of other classes are rejected.
inline NbModel nb_train(std::span<const NbSample> samples, NbVariant variant,
                        std::span<const TableCategory> classes = kTextClasses, double alpha = 1.0) {
  NbModel m;
  m.variant = variant;
  m.alpha = alpha;
  m.classes.assign(classes.begin(), classes.end());
  if (m.classes.empty()) throw std::invalid_argument("nb_train: no classes");
  if (!(alpha > 0)) throw std::invalid_argument("nb_train: alpha must be positive");

  auto class_index = [&](TableCategory c) -> std::size_t {
    for (std::size_t i = 0; i < m.classes.size(); ++i)
      if (m.classes[i] == c) return i;
    throw std::invalid_argument("nb_train: sample category " + std::string(to_string(c)) +
                                " is not a model class");
  };

  for (const auto& s : samples)
    for (const auto& t : s.tokens) m.vocab.emplace(t, 0);
  std::size_t next = 0;
  for (auto& [tok, idx] : m.vocab) idx = next++;

  m.class_doc_counts.assign(m.classes.size(), 0);
  m.class_token_counts.assign(m.classes.size(), std::vector<std::size_t>(m.vocab.size(), 0));
  for (const auto& s : samples) {
    const auto c = class_index(s.category);
    ++m.class_doc_counts[c];
    for (const auto& t : s.tokens) ++m.class_token_counts[c][m.vocab.at(t)];
  }
  for (std::size_t c = 0; c < m.classes.size(); ++c)
    if (m.class_doc_counts[c] == 0)
      throw std::invalid_argument("nb_train: class " + std::string(to_string(m.classes[c])) +
                                  " has no training samples");
  return m;
}

struct NbPrediction {
  TableCategory category;
  std::vector<double> log_posterior;  ///< unnormalized, in model class order
};

/// Log prior plus per-token smoothed log likelihood. Tokens outside the
/// vocabulary contribute alpha / (N_c + alpha·|V|). Ties resolve to the
/// earliest class in model order.
inline NbPrediction nb_predict(const NbModel& m, std::span<const std::string> tokens) {
  std::size_t total_docs = 0;
  for (auto n : m.class_doc_counts) total_docs += n;
  const double v = static_cast<double>(m.vocab.size());

  NbPrediction p{m.classes.front(), std::vector<double>(m.classes.size(), 0.0)};
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    std::size_t class_total = 0;
    for (auto n : m.class_token_counts[c]) class_total += n;
    const double denom = std::log(static_cast<double>(class_total) + m.alpha * v);
    double lp = std::log(static_cast<double>(m.class_doc_counts[c]) / static_cast<double>(total_docs));
    for (const auto& t : tokens) {
      const auto it = m.vocab.find(t);
      const double count = it == m.vocab.end() ? 0.0
                                                : static_cast<double>(m.class_token_counts[c][it->second]);
      lp += std::log(count + m.alpha) - denom;
    }
    p.log_posterior[c] = lp;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < m.classes.size(); ++c)
    if (p.log_posterior[c] > p.log_posterior[best]) best = c;
  p.category = m.classes[best];
  return p;
}

inline NbPrediction nb_predict(const NbModel& m, const RegionText& text) {
  return nb_predict(m, std::span<const std::string>(text.tokens));
}

inline nlohmann::json to_json(const NbModel& m) {
  using nlohmann::json;
  json j;
  j["variant"] = std::string(to_string(m.variant));
  json classes = json::array();
  for (auto c : m.classes) classes.push_back(std::string(to_string(c)));
  j["classes"] = classes;
  json vocab = json::object();
  for (const auto& [tok, idx] : m.vocab) vocab[tok] = idx;
  j["vocab"] = vocab;
  json docs = json::object();
  json tokens = json::object();
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    const std::string name(to_string(m.classes[c]));
    docs[name] = m.class_doc_counts[c];
    json counts = json::object();
    for (std::size_t i = 0; i < m.class_token_counts[c].size(); ++i)
      if (m.class_token_counts[c][i] > 0) counts[std::to_string(i)] = m.class_token_counts[c][i];
    tokens[name] = counts;
  }
  j["class_doc_counts"] = docs;
  j["class_token_counts"] = tokens;
  j["alpha"] = m.alpha;
  return j;
}

inline NbModel nb_model_from_json(const nlohmann::json& j) {
  try {
    NbModel m;
    auto variant = nb_variant_from_string(j.at("variant").get<std::string>());
    if (!variant) throw ParseError("NB model: unknown variant");
    m.variant = *variant;
    for (const auto& c : j.at("classes")) {
      auto cat = category_from_string(c.get<std::string>());
      if (!cat) throw ParseError("NB model: unknown class '" + c.get<std::string>() + "'");
      m.classes.push_back(*cat);
    }
    for (auto it = j.at("vocab").begin(); it != j.at("vocab").end(); ++it)
      m.vocab[it.key()] = it.value().get<std::size_t>();
    for (const auto& [tok, idx] : m.vocab)
      if (idx >= m.vocab.size()) throw ParseError("NB model: vocab index out of range for '" + tok + "'");
    m.alpha = j.at("alpha").get<double>();
    for (auto c : m.classes) {
      const std::string name(to_string(c));
      m.class_doc_counts.push_back(j.at("class_doc_counts").at(name).get<std::size_t>());
      std::vector<std::size_t> counts(m.vocab.size(), 0);
      const auto& cj = j.at("class_token_counts").at(name);
      for (auto it = cj.begin(); it != cj.end(); ++it) {
        const auto idx = static_cast<std::size_t>(std::stoul(it.key()));
        if (idx >= counts.size()) throw ParseError("NB model: token index out of range");
        counts[idx] = it.value().get<std::size_t>();
      }
      m.class_token_counts.push_back(std::move(counts));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("NB model: ") + e.what());
  }
}

inline void save_nb_model(const NbModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << to_json(m).dump(1) << '\n';
}

inline NbModel load_nb_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return nb_model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace tabsniper
