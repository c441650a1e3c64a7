#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrts/mrts.hpp"

namespace mrts::cli {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting helpers

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

json big_json(const BigInt& x) {
  if (x >= 0 && x <= std::numeric_limits<std::uint64_t>::max()) {
    return x.convert_to<std::uint64_t>();
  }
  return x.str();
}

// RFC 4180: quote fields containing separators, quotes or line breaks.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

json matrix_json(const IntMatrix& m) { return m.rows(); }

// ---------------------------------------------------------------------------
// Input helpers

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> read_file_lines(const std::string& path) {
  if (path == "-") return read_lines(std::cin);
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  return read_lines(in);
}

bool looks_like_fmatrix(const std::string& s) {
  return s.find(';') != std::string::npos ||
         (s.find('|') == std::string::npos &&
          s.find('{') == std::string::npos);
}

FMatrix parse_fmatrix(const std::string& text) {
  std::vector<std::vector<int>> rows;
  std::stringstream ss(text);
  std::string row;
  std::size_t offset = 0;
  while (std::getline(ss, row, ';')) {
    std::vector<int> r;
    std::stringstream rs(row);
    std::string cell;
    while (std::getline(rs, cell, ',')) {
      const auto a = cell.find_first_not_of(" \t");
      const auto b = cell.find_last_not_of(" \t\r\n");
      if (a == std::string::npos) throw ParseError("empty matrix entry", offset);
      const auto body = cell.substr(a, b - a + 1);
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(body, &used);
      } catch (const std::exception&) {
        throw ParseError("expected an integer", offset);
      }
      if (used != body.size()) throw ParseError("expected an integer", offset);
      r.push_back(v);
      offset += cell.size() + 1;
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError("empty matrix", 0);
  return FMatrix(rows);
}

// A shape given as compact text, a JSON object, or an F-matrix "a;b,c;...".
TreeShape parse_any_shape(const std::string& text) {
  const auto first = text.find_first_not_of(" \t");
  const std::string body = first == std::string::npos ? "" : text.substr(first);
  if (!body.empty() && looks_like_fmatrix(body)) {
    return to_shape(parse_fmatrix(body));
  }
  return parse_shape_line(text);
}

// Arguments naming an existing file are read from it (first shape line).
TreeShape shape_argument(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    const auto lines = read_file_lines(arg);
    if (lines.empty()) throw DomainError("'" + arg + "' holds no shape");
    std::string joined;
    for (const auto& l : lines) joined += l;
    return parse_any_shape(joined);
  }
  return parse_any_shape(arg);
}

// Unvalidated {t, l} from a JSON object, so constraint violations can be
// reported rather than thrown.
StringRepr json_string_repr(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  StringRepr s;
  try {
    s.t = j.at("t").get<std::vector<int>>();
    s.l = j.at("l").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad JSON shape: ") + e.what(), 0);
  }
  return s;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Enumerate {
  int n = 0;
  std::optional<int> n_min;
  std::string format = "csv";
  bool compare = false;

  int run(std::ostream& out) const {
    const int lo = n_min.value_or(n);
    if (lo < 2 || lo > n) throw DomainError("need 2 <= n-min <= n");
    if (compare) return run_compare(out, lo);
    if (format == "json") {
      json rows = json::array();
      for (int N = lo; N <= n; ++N) {
        json counts = json::array();
        for (int K = 1; K <= N - 1; ++K) {
          counts.push_back(big_json(count_shapes(N, K).value));
        }
        rows.push_back({{"n", N},
                        {"counts", counts},
                        {"total", big_json(count_space(N).value)}});
      }
      out << rows.dump(2) << '\n';
      return kOk;
    }
    std::vector<std::string> header{"n"};
    for (int K = 1; K <= n - 1; ++K) header.push_back("k_" + std::to_string(K));
    header.push_back("total");
    if (format == "table") {
      for (const auto& h : header) out << std::setw(12) << h;
      out << '\n';
    } else {
      csv_row(out, header);
    }
    for (int N = lo; N <= n; ++N) {
      std::vector<std::string> row{std::to_string(N)};
      for (int K = 1; K <= n - 1; ++K) {
        row.push_back(K <= N - 1 ? count_shapes(N, K).value.str() : "");
      }
      row.push_back(count_space(N).value.str());
      if (format == "table") {
        for (const auto& c : row) out << std::setw(12) << c;
        out << '\n';
      } else {
        csv_row(out, row);
      }
    }
    return kOk;
  }

  int run_compare(std::ostream& out, int lo) const {
    const std::vector<std::string> header{
        "n", "ranked_unlabeled", "ranked_labeled", "ranked_labeled_binary"};
    json rows = json::array();
    if (format == "csv") csv_row(out, header);
    for (int N = lo; N <= n; ++N) {
      const auto a = count_space(N).value;
      const auto b = count_labeled_ranked(N);
      const auto c = count_labeled_binary(N);
      if (format == "json") {
        rows.push_back({{"n", N},
                        {"ranked_unlabeled", big_json(a)},
                        {"ranked_labeled", big_json(b)},
                        {"ranked_labeled_binary", big_json(c)}});
      } else if (format == "table") {
        out << std::setw(4) << N << std::setw(22) << a.str() << std::setw(22)
            << b.str() << std::setw(22) << c.str() << '\n';
      } else {
        csv_row(out, {std::to_string(N), a.str(), b.str(), c.str()});
      }
    }
    if (format == "json") out << rows.dump(2) << '\n';
    return kOk;
  }
};

struct Validate {
  std::optional<std::string> tree;
  std::optional<std::string> fmatrix;
  std::optional<std::string> in;
  std::string format = "text";

  int run(std::ostream& out, std::ostream& err) const {
    std::vector<std::string> items;
    bool as_matrix = fmatrix.has_value();
    if (tree) items.push_back(*tree);
    if (fmatrix) items.push_back(*fmatrix);
    if (in) items = read_file_lines(*in);
    if (items.empty()) throw CLI::RequiredError("--tree, --fmatrix or --in");
    int status = kOk;
    json report = json::array();
    for (const auto& item : items) {
      std::string constraint, detail;
      std::optional<TreeShape> shape;
      if (as_matrix || (in && looks_like_fmatrix(item))) {
        const auto f = parse_fmatrix(item);
        const auto v = validate_fmatrix(f);
        if (v) {
          shape = to_shape(f);
        } else {
          constraint = to_string(*v.violated);
          detail = v.detail;
        }
      } else {
        const auto s = item.find('{') != std::string::npos
                           ? json_string_repr(item)
                           : parse_string_repr(item);
        const auto v = validate_string(s);
        if (v) {
          shape = TreeShape(s);
        } else {
          constraint = to_string(*v.violated);
          detail = v.detail;
        }
      }
      if (!shape) {
        status = kDomainError;
        err << "invalid: violates " << constraint << ": " << detail << '\n';
      }
      if (format == "json") {
        json r{{"input", item}, {"valid", shape.has_value()}};
        if (shape) {
          r["n"] = shape->n_tips();
          r["k"] = shape->n_internal();
        } else {
          r["violated"] = constraint;
          r["detail"] = detail;
        }
        report.push_back(r);
      } else if (shape) {
        out << "valid N=" << shape->n_tips() << " K=" << shape->n_internal()
            << '\n';
      }
    }
    if (format == "json") out << (items.size() == 1 ? report[0] : report).dump()
                              << '\n';
    return status;
  }
};

struct Convert {
  std::optional<std::string> tree;
  std::optional<std::string> fmatrix;
  std::string to = "fmatrix";

  int run(std::ostream& out) const {
    if (!tree && !fmatrix) throw CLI::RequiredError("--tree or --fmatrix");
    const TreeShape s =
        tree ? parse_shape_line(*tree) : to_shape(parse_fmatrix(*fmatrix));
    if (to == "text") {
      out << to_text(s) << '\n';
    } else if (to == "json") {
      out << to_json(s).dump() << '\n';
    } else if (to == "fmatrix") {
      out << string_to_fmatrix(s).to_text() << '\n';
    } else {
      out << string_to_dmatrix(s.repr()).to_text() << '\n';
    }
    return kOk;
  }
};

struct Lub {
  std::string a, b;
  bool trace = false;
  std::string format = "text";

  int run(std::ostream& out) const {
    const auto res = lub_with_trace(shape_argument(a), shape_argument(b));
    if (format == "json") {
      json j{{"lub", to_text(res.shape)},
             {"fmatrix", res.fmatrix.rows()},
             {"k", res.shape.n_internal()}};
      if (trace) {
        json steps = json::array({matrix_json(res.trace.shared)});
        for (const auto& m : res.trace.passes) steps.push_back(matrix_json(m));
        j["trace"] = steps;
      }
      out << j.dump() << '\n';
      return kOk;
    }
    if (trace) {
      out << "shared " << res.trace.shared.to_text() << '\n';
      for (std::size_t i = 0; i < res.trace.passes.size(); ++i) {
        out << "pass" << i + 1 << ' ' << res.trace.passes[i].to_text() << '\n';
      }
      out << "fmatrix " << res.fmatrix.to_text() << '\n';
    }
    out << to_text(res.shape) << '\n';
    return kOk;
  }
};

struct Distance {
  std::string a, b;
  std::string format = "text";

  int run(std::ostream& out) const {
    const auto x = shape_argument(a);
    const auto y = shape_argument(b);
    const int d = lattice_distance(x, y);
    if (format == "json") {
      out << json{{"distance", d}, {"lub", to_text(lub(x, y))}}.dump() << '\n';
    } else {
      out << d << '\n';
    }
    return kOk;
  }
};

struct Degree {
  std::optional<std::string> tree;
  std::optional<int> max_n;
  std::string format = "text";

  int run(std::ostream& out) const {
    if (max_n) {
      const auto t = max_degree_tree(*max_n);
      if (format == "json") {
        out << json{{"n", *max_n},
                    {"tree", to_text(t.shape)},
                    {"max_degree", t.max_degree}}
                   .dump()
            << '\n';
      } else {
        out << to_text(t.shape) << '\t' << t.max_degree << '\n';
      }
      return kOk;
    }
    if (!tree) throw CLI::RequiredError("--tree or --max");
    const auto s = shape_argument(*tree);
    const Count up = deg_plus(s), down = deg_minus(s);
    if (format == "json") {
      out << json{{"deg_plus", up}, {"deg_minus", down}, {"degree", up + down}}
                 .dump()
          << '\n';
    } else {
      out << "deg+ " << up << "\ndeg- " << down << "\ndeg " << up + down
          << '\n';
    }
    return kOk;
  }
};

struct Hasse {
  int n = 0;
  int cap = kDefaultGenerationCap;
  std::string format = "tsv";

  int run(std::ostream& out) const {
    const auto g = build_hasse(n, cap);
    if (format == "json") {
      json nodes = json::array(), edges = json::array();
      for (const auto& v : g.vertices) nodes.push_back(to_text(v));
      for (std::size_t v = 0; v < g.size(); ++v) {
        for (auto u : g.up[v]) edges.push_back({u, v});
      }
      out << json{{"n", n}, {"nodes", nodes}, {"edges", edges}}.dump() << '\n';
      return kOk;
    }
    // One covering pair per line, coarser shape first.
    for (std::size_t v = 0; v < g.size(); ++v) {
      for (auto u : g.up[v]) {
        out << to_text(g.vertices[u]) << '\t' << to_text(g.vertices[v]) << '\n';
      }
    }
    return kOk;
  }
};

json figures_json(const std::optional<ExactChainFigures>& f) {
  if (!f) return nullptr;
  return {{"bottleneck", f->phi},
          {"spectral_gap", f->gap},
          {"relaxation_time", f->relaxation_time}};
}

struct Bounds {
  int n = 0;
  std::string format = "json";

  int run(std::ostream& out) const {
    const auto r = mixing_bounds(n);
    if (format == "text") {
      out << "N " << r.n << "\nM_N " << r.m_n << "\nG(N) " << r.g_n.str()
          << "\nsymmetric lower " << fmt_double(r.sym_lower)
          << "\nsymmetric upper " << fmt_double(r.sym_upper)
          << "\nrandom-walk lower " << fmt_double(r.rw_lower)
          << "\nrandom-walk upper " << fmt_double(r.rw_upper) << '\n';
      if (r.diameter) out << "diameter " << *r.diameter << '\n';
      return kOk;
    }
    json j{{"n", r.n},
           {"m_n", r.m_n},
           {"g_n", big_json(r.g_n)},
           {"symmetric", {{"lower", r.sym_lower}, {"upper", r.sym_upper}}},
           {"random_walk", {{"lower", r.rw_lower}, {"upper", r.rw_upper}}},
           {"exact_symmetric_lazy", figures_json(r.sym_exact)},
           {"exact_random_walk_lazy", figures_json(r.rw_exact)},
           {"diameter", r.diameter ? json(*r.diameter) : json(nullptr)}};
    out << j.dump(2) << '\n';
    return kOk;
  }
};

struct Exact {
  int n = 0;
  std::string chain = "sym";
  bool lazy = false;
  std::string format = "json";

  int run(std::ostream& out) const {
    const auto k = exact_kernel({parse_chain_kind(chain), lazy, n});
    const auto gap = exact_gap(k);
    double row_err = 0, asym = 0;
    for (Eigen::Index i = 0; i < k.P.rows(); ++i) {
      row_err = std::max(row_err, std::abs(k.P.row(i).sum() - 1.0));
      for (Eigen::Index j = 0; j < k.P.cols(); ++j) {
        asym = std::max(asym, std::abs(k.P(i, j) - k.P(j, i)));
      }
    }
    json j{{"n", n},
           {"chain", std::string(to_string(k.spec.kind))},
           {"lazy", lazy},
           {"states", k.states.size()},
           {"row_sum_error", row_err},
           {"asymmetry", asym},
           {"stationarity_residual", stationarity_residual(k)},
           {"detailed_balance_residual", detailed_balance_residual(k)},
           {"irreducible", is_irreducible(k)},
           {"spectral_gap", gap.gap},
           {"absolute_gap", gap.absolute_gap},
           {"relaxation_time", gap.relaxation_time}};
    if (n <= kBottleneckCap) {
      const auto b = exact_bottleneck(k);
      json sets = json::array();
      for (const auto& s : b.argmin) {
        json names = json::array();
        for (auto x : s) names.push_back(to_text(k.states[x]));
        sets.push_back(names);
      }
      j["bottleneck"] = b.phi;
      j["bottleneck_argmin"] = sets;
    }
    if (format == "text") {
      for (const auto& [key, v] : j.items()) {
        if (key == "bottleneck_argmin") continue;
        out << key << ' ' << v.dump() << '\n';
      }
    } else {
      out << j.dump(2) << '\n';
    }
    return kOk;
  }
};

void emit_shape(std::ostream& out, const std::string& format,
                const TreeShape& s, const json& extra) {
  if (format == "jsonl") {
    json j = extra;
    j["shape"] = to_text(s);
    out << j.dump() << '\n';
  } else {
    out << to_text(s) << '\n';
  }
}

struct SampleUniform {
  int n = 0;
  int chains = 1;
  std::uint64_t steps = 0;
  std::uint64_t thin = 1;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string chain = "mh";
  bool lazy = false;
  std::optional<std::string> init;
  std::string format = "text";

  int run(std::ostream& out, std::ostream& err) const {
    RunOptions opt;
    opt.spec = {parse_chain_kind(chain), lazy, n};
    opt.chains = chains;
    opt.steps = steps;
    opt.thin = thin;
    opt.burn_in = burn_in;
    opt.seed = seed;
    opt.threads = threads;
    if (init) opt.init = shape_argument(*init);
    const auto res = run_chains(opt);
    for (const auto& c : res.chains) {
      for (const auto& [step, s] : c.samples) {
        emit_shape(out, format, s, {{"chain", c.chain}, {"step", step}});
      }
      if (opt.spec.kind == ChainKind::mh_uniform) {
        err << "chain " << c.chain << " acceptance "
            << fmt_double(c.acceptance_rate()) << '\n';
      }
    }
    if (opt.spec.kind == ChainKind::mh_uniform) {
      err << "overall acceptance " << fmt_double(res.acceptance_rate()) << '\n';
    }
    return kOk;
  }
};

struct SampleCoalescent {
  int n = 0;
  double a = 1.0, b = 1.0;
  std::optional<double> alpha;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string format = "text";

  int run(std::ostream& out) const {
    const LambdaBeta m = alpha ? LambdaBeta::from_alpha(*alpha) : LambdaBeta(a, b);
    const auto shapes = sample_topologies(n, m, count, seed, threads);
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      emit_shape(out, format, shapes[i], {{"index", i}});
    }
    return kOk;
  }
};

struct SemiRandom {
  int n = 0;
  std::optional<int> k;
  std::uint64_t seed = 0;
  int count = 1;
  std::string format = "text";

  int run(std::ostream& out) const {
    Rng rng(seed);
    const int lo = k.value_or(1), hi = k.value_or(n - 1);
    for (int rep = 0; rep < count; ++rep) {
      for (int K = lo; K <= hi; ++K) {
        const auto f = semi_random_fmatrix(n, K, rng);
        if (format == "fmatrix") {
          out << f.to_text() << '\n';
        } else {
          emit_shape(out, format, to_shape(f), {{"k", K}});
        }
      }
    }
    return kOk;
  }
};

struct Stats {
  std::string in;
  std::optional<std::string> summary_path;
  std::string cherries = "2,3,4,5,6";
  std::string format = "csv";

  int run(std::ostream& out) const {
    const auto sizes = parse_int_list(cherries);
    Accumulator acc;
    std::vector<std::string> header{"n", "k", "max_block", "avg_block"};
    for (int m : sizes) header.push_back("cherry_" + std::to_string(m));
    if (format == "csv") csv_row(out, header);
    for (const auto& line : read_file_lines(in)) {
      const auto st = shape_stats(parse_shape_line(line));
      acc.add(st);
      if (format != "csv") continue;
      std::vector<std::string> row{std::to_string(st.n), std::to_string(st.k),
                                   std::to_string(st.max_block),
                                   fmt_double(st.avg_block)};
      for (int m : sizes) row.push_back(std::to_string(st.cherry(m)));
      csv_row(out, row);
    }
    const auto s = acc.summary(sizes);
    json j{{"count", s.count},
           {"n", s.n},
           {"mean_k", s.mean_k},
           {"median_k", s.median_k},
           {"mean_max_block", s.mean_max_block},
           {"median_max_block", s.median_max_block},
           {"mean_avg_block", s.mean_avg_block},
           {"median_avg_block", s.median_avg_block}};
    json mc = json::object(), sc = json::object();
    for (const auto& [m, v] : s.mean_cherries) mc[std::to_string(m)] = v;
    for (const auto& [m, v] : s.scaled_cherries) sc[std::to_string(m)] = v;
    j["mean_cherries"] = mc;
    j["scaled_cherries"] = sc;
    if (format == "json") out << j.dump(2) << '\n';
    if (summary_path) {
      std::ofstream f(*summary_path);
      if (!f) throw DomainError("cannot write '" + *summary_path + "'");
      f << j.dump(2) << '\n';
    }
    return kOk;
  }
};

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Ranked multifurcating tree shapes: counting, lattice, sampling",
               "mrts"};
  app.require_subcommand(1);
  app.fallthrough(false);

  const auto formats = [](std::initializer_list<std::string> f) {
    return CLI::IsMember(std::vector<std::string>(f));
  };
  int status = kOk;
  std::function<int()> action;

  Enumerate en;
  auto* s_en = app.add_subcommand("enumerate", "count shapes G(N,K)");
  s_en->add_option("--n", en.n, "largest tip count")->required()->check(
      CLI::Range(2, 400));
  s_en->add_option("--n-min", en.n_min, "smallest tip count (default: --n)");
  s_en->add_option("--format", en.format)->check(formats({"csv", "json", "table"}));
  s_en->add_flag("--compare", en.compare, "labeled-space comparison columns");
  s_en->callback([&] { action = [&] { return en.run(out); }; });

  Validate va;
  auto* s_va = app.add_subcommand("validate", "check string or F-matrix constraints");
  s_va->add_option("--tree", va.tree, "compact text t|l or JSON");
  s_va->add_option("--fmatrix", va.fmatrix, "rows separated by ';'");
  s_va->add_option("--in", va.in, "file with one shape per line");
  s_va->add_option("--format", va.format)->check(formats({"text", "json"}));
  s_va->callback([&] { action = [&] { return va.run(out, err); }; });

  Convert co;
  auto* s_co = app.add_subcommand("convert", "convert between representations");
  s_co->add_option("--tree", co.tree);
  s_co->add_option("--fmatrix", co.fmatrix);
  s_co->add_option("--to", co.to)->check(
      formats({"text", "json", "fmatrix", "dmatrix"}));
  s_co->callback([&] { action = [&] { return co.run(out); }; });

  Lub lu;
  auto* s_lu = app.add_subcommand("lub", "least upper bound of two shapes");
  s_lu->add_option("--a", lu.a, "shape text, F-matrix or file")->required();
  s_lu->add_option("--b", lu.b, "shape text, F-matrix or file")->required();
  s_lu->add_flag("--trace", lu.trace, "print intermediate matrices");
  s_lu->add_option("--format", lu.format)->check(formats({"text", "json"}));
  s_lu->callback([&] { action = [&] { return lu.run(out); }; });

  Distance di;
  auto* s_di = app.add_subcommand("distance", "lattice distance");
  s_di->add_option("--a", di.a)->required();
  s_di->add_option("--b", di.b)->required();
  s_di->add_option("--format", di.format)->check(formats({"text", "json"}));
  s_di->callback([&] { action = [&] { return di.run(out); }; });

  Degree de;
  auto* s_de = app.add_subcommand("degree", "up, down and total degree");
  s_de->add_option("--tree", de.tree);
  s_de->add_option("--max", de.max_n, "print the max-degree tree for N");
  s_de->add_option("--format", de.format)->check(formats({"text", "json"}));
  s_de->callback([&] { action = [&] { return de.run(out); }; });

  Hasse ha;
  auto* s_ha = app.add_subcommand("hasse", "covering relation as an edge list");
  s_ha->add_option("--n", ha.n)->required();
  s_ha->add_option("--cap", ha.cap, "exhaustive generation limit");
  s_ha->add_option("--format", ha.format)->check(formats({"tsv", "json"}));
  s_ha->callback([&] { action = [&] { return ha.run(out); }; });

  Bounds bo;
  auto* s_bo = app.add_subcommand("bounds", "mixing-time bound formulas");
  s_bo->add_option("--n", bo.n)->required();
  s_bo->add_option("--format", bo.format)->check(formats({"json", "text"}));
  s_bo->callback([&] { action = [&] { return bo.run(out); }; });

  Exact ex;
  auto* s_ex = app.add_subcommand("exact", "exact kernel diagnostics (small N)");
  s_ex->add_option("--n", ex.n)->required();
  s_ex->add_option("--chain", ex.chain)->check(formats({"sym", "rw", "mh"}));
  s_ex->add_flag("--lazy", ex.lazy);
  s_ex->add_option("--format", ex.format)->check(formats({"json", "text"}));
  s_ex->callback([&] { action = [&] { return ex.run(out); }; });

  SampleUniform su;
  auto* s_su = app.add_subcommand("sample-uniform", "run lattice Markov chains");
  s_su->add_option("--n", su.n)->required();
  s_su->add_option("--chains", su.chains)->check(CLI::PositiveNumber);
  s_su->add_option("--steps", su.steps)->required();
  s_su->add_option("--thin", su.thin)->check(CLI::PositiveNumber);
  s_su->add_option("--burn-in", su.burn_in);
  s_su->add_option("--seed", su.seed)->required();
  s_su->add_option("--threads", su.threads)->check(CLI::PositiveNumber);
  s_su->add_option("--chain", su.chain)->check(formats({"mh", "sym", "rw"}));
  s_su->add_flag("--lazy", su.lazy);
  s_su->add_option("--init", su.init, "starting shape (default: semi-random)");
  s_su->add_option("--format", su.format)->check(formats({"text", "jsonl"}));
  s_su->callback([&] { action = [&] { return su.run(out, err); }; });

  SampleCoalescent sc;
  auto* s_sc = app.add_subcommand("sample-coalescent", "Beta-coalescent topologies");
  s_sc->add_option("--n", sc.n)->required();
  auto* opt_a = s_sc->add_option("--a", sc.a, "Beta shape a (default 1)");
  auto* opt_b = s_sc->add_option("--b", sc.b, "Beta shape b (default 1)");
  s_sc->add_option("--alpha", sc.alpha, "Beta(2-alpha, alpha)")
      ->excludes(opt_a)
      ->excludes(opt_b);
  s_sc->add_option("--count", sc.count)->check(CLI::PositiveNumber);
  s_sc->add_option("--seed", sc.seed)->required();
  s_sc->add_option("--threads", sc.threads)->check(CLI::PositiveNumber);
  s_sc->add_option("--format", sc.format)->check(formats({"text", "jsonl"}));
  s_sc->callback([&] { action = [&] { return sc.run(out); }; });

  SemiRandom sr;
  auto* s_sr = app.add_subcommand("semi-random", "semi-random shapes (one per K by default)");
  s_sr->add_option("--n", sr.n)->required();
  s_sr->add_option("--k", sr.k);
  s_sr->add_option("--seed", sr.seed)->required();
  s_sr->add_option("--count", sr.count)->check(CLI::PositiveNumber);
  s_sr->add_option("--format", sr.format)->check(
      formats({"text", "jsonl", "fmatrix"}));
  s_sr->callback([&] { action = [&] { return sr.run(out); }; });

  Stats st;
  auto* s_st = app.add_subcommand("stats", "per-shape statistics and summary");
  s_st->add_option("--in", st.in, "file with one shape per line ('-' = stdin)")
      ->required();
  s_st->add_option("--summary", st.summary_path, "write the JSON summary here");
  s_st->add_option("--cherries", st.cherries, "cherry sizes, comma separated");
  s_st->add_option("--format", st.format)->check(formats({"csv", "json"}));
  s_st->callback([&] { action = [&] { return st.run(out); }; });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
    status = action ? action() : kUsageError;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  } catch (const mrts::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::logic_error& e) {
    // DomainError, StructuralError and friends.
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return status;
}

}  // namespace mrts::cli
