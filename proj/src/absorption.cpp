#include "proofdoor/absorption.hpp"

#include "proofdoor/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

namespace proofdoor {

bool is_absorbed(PropagationEngine &engine, const Clause &c) {
  if (c.empty())
    return engine.conflicts({});
  std::vector<Lit> assumptions;
  assumptions.reserve(c.size());
  for (Lit keep : c) {
    assumptions.clear();
    for (Lit l : c)
      if (l != keep)
        assumptions.push_back(~l);
    if (!engine.forces_or_conflicts(assumptions, keep))
      return false;
  }
  return true;
}

bool is_absorbed(const CnfFormula &f, const Clause &c) {
  PropagationEngine engine(f);
  return is_absorbed(engine, c);
}

double absorption_fraction(PropagationEngine &engine, const CnfFormula &i) {
  if (i.empty())
    return 1.0;
  std::size_t n = 0;
  for (const Clause &c : i)
    n += is_absorbed(engine, c);
  return static_cast<double>(n) / static_cast<double>(i.size());
}

double absorption_fraction(const CnfFormula &f, const CnfFormula &i) {
  PropagationEngine engine(f);
  return absorption_fraction(engine, i);
}

//===----------------------------------------------------------------------===//
// Partial proofs
//===----------------------------------------------------------------------===//

PartialProofs::PartialProofs(CnfFormula base, std::vector<Clause> additions,
                             std::vector<std::size_t> chunk_of_addition,
                             std::size_t num_prefixes)
    : base_(std::move(base)), additions_(std::move(additions)),
      chunk_of_addition_(std::move(chunk_of_addition)),
      num_prefixes_(num_prefixes) {
  if (additions_.size() != chunk_of_addition_.size())
    throw ContractError("every addition needs a chunk tag");
  for (std::size_t c : chunk_of_addition_)
    if (c >= num_prefixes_)
      throw ContractError("addition tagged past the last prefix");
}

std::vector<Clause> PartialProofs::additions_in(std::size_t i,
                                                bool include_empty) const {
  std::vector<Clause> out;
  for (std::size_t k = 0; k < additions_.size(); ++k)
    if (chunk_of_addition_[k] <= i &&
        (include_empty || !additions_[k].empty()))
      out.push_back(additions_[k]);
  return out;
}

CnfFormula PartialProofs::prefix(std::size_t i, bool include_empty) const {
  return base_.with(additions_in(i, include_empty));
}

PartialProofs partition_trace(const CnfFormula &base, const DratTrace &trace,
                              const VarChunkMap &m, std::size_t k) {
  if (k == 0)
    throw ContractError("partition needs at least one prefix");
  std::vector<std::size_t> tags;
  tags.reserve(trace.additions.size());
  for (std::size_t i = 0; i < trace.additions.size(); ++i) {
    const Clause &c = trace.additions[i];
    for (Lit l : c)
      if (!m.contains(l.var()))
        throw InputError("trace addition " + std::to_string(i + 1) +
                         " uses variable " + std::to_string(l.var()) +
                         " absent from the chunk map");
    tags.push_back(std::min(clause_chunk(c, m), k - 1));
  }
  return PartialProofs(base, trace.additions, std::move(tags), k);
}

//===----------------------------------------------------------------------===//
// Heatmap
//===----------------------------------------------------------------------===//

AbsorptionMatrix heatmap(const PartialProofs &pp,
                         const std::vector<CnfFormula> &interpolants,
                         const HeatmapOptions &opts) {
  const std::size_t rows = pp.num_prefixes();
  if (interpolants.size() + 1 != rows)
    throw ContractError("heatmap needs " + std::to_string(rows - 1) +
                        " interpolants for " + std::to_string(rows) +
                        " prefixes, got " +
                        std::to_string(interpolants.size()));
  AbsorptionMatrix m;
  m.h.assign(rows, std::vector<double>(interpolants.size(), 0.0));

  // Additions grouped by prefix so each worker can grow one engine through
  // its block of consecutive rows.
  std::vector<std::vector<const Clause *>> by_chunk(rows);
  for (std::size_t k = 0; k < pp.additions().size(); ++k) {
    const Clause &c = pp.additions()[k];
    if (c.empty() && !opts.include_empty_clause)
      continue;
    by_chunk[pp.chunk_of_addition()[k]].push_back(&c);
  }

  auto work = [&](std::size_t first, std::size_t last) {
    PropagationEngine engine(pp.base());
    for (std::size_t r = 0; r < first; ++r)
      for (const Clause *c : by_chunk[r])
        engine.add_clause(*c);
    for (std::size_t r = first; r < last; ++r) {
      for (const Clause *c : by_chunk[r])
        engine.add_clause(*c);
      for (std::size_t j = 0; j < interpolants.size(); ++j)
        m.h[r][j] = absorption_fraction(engine, interpolants[j]);
    }
  };

  std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, rows);
  if (jobs == 1) {
    work(0, rows);
    return m;
  }
  std::vector<std::thread> pool;
  std::size_t per = (rows + jobs - 1) / jobs;
  for (std::size_t first = 0; first < rows; first += per)
    pool.emplace_back(work, first, std::min(rows, first + per));
  for (auto &t : pool)
    t.join();
  return m;
}

AbsorptionMatrix heatmap(const PartialProofs &pp, const Proofdoor &pd,
                         const HeatmapOptions &opts) {
  return heatmap(pp, pd.interpolants, opts);
}

double incrementality_score(const AbsorptionMatrix &m) {
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.h[i].size() && j <= i; ++j) {
      sum += m.h[i][j];
      ++n;
    }
  return n == 0 ? 1.0 : sum / static_cast<double>(n);
}

void write_heatmap_csv(std::ostream &out, const AbsorptionMatrix &m) {
  out << "prefix";
  for (std::size_t j = 0; j < m.cols(); ++j)
    out << ",I_" << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << "Pi_" << i;
    for (double v : m.h[i])
      out << ',' << v;
    out << '\n';
  }
}

void write_heatmap_svg(std::ostream &out, const AbsorptionMatrix &m,
                       int cell_px) {
  const int margin = 48;
  const int w = margin + static_cast<int>(m.cols()) * cell_px + 8;
  const int h = margin + static_cast<int>(m.rows()) * cell_px + 8;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" font-family=\"sans-serif\" "
      << "font-size=\"10\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"12\">interpolant I_j</text>\n";
  out << "<text x=\"4\" y=\"" << margin - 4 << "\">prefix</text>\n";
  for (std::size_t j = 0; j < m.cols(); ++j)
    out << "<text x=\"" << margin + static_cast<int>(j) * cell_px + 2
        << "\" y=\"" << margin - 4 << "\">" << j + 1 << "</text>\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    int y = margin + static_cast<int>(i) * cell_px;
    out << "<text x=\"4\" y=\"" << y + cell_px * 2 / 3 << "\">" << i
        << "</text>\n";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double v = std::clamp(m.h[i][j], 0.0, 1.0);
      int level = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      out << "<rect x=\"" << margin + static_cast<int>(j) * cell_px
          << "\" y=\"" << y << "\" width=\"" << cell_px << "\" height=\""
          << cell_px << "\" fill=\"rgb(" << level << ',' << level << ','
          << level << ")\"/>\n";
    }
  }
  out << "</svg>\n";
}

std::string heatmap_summary_json(const AbsorptionMatrix &m) {
  nlohmann::json j;
  j["score"] = incrementality_score(m);
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  nlohmann::json first = nlohmann::json::array();
  for (std::size_t c = 0; c < m.cols(); ++c) {
    nlohmann::json row = nullptr;
    for (std::size_t r = 0; r < m.rows(); ++r)
      if (m.h[r][c] >= 1.0) {
        row = r;
        break;
      }
    first.push_back(row);
  }
  j["first_full_row"] = std::move(first);
  return j.dump(2);
}

} // namespace proofdoor
