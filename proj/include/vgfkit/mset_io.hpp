#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vgfkit/mset.hpp"

namespace vgfkit {

namespace io {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

// Splits the stream into non-empty lines, dropping '#' comments.
inline std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> out;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    Line line{number, {}};
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

inline double parse_double(const std::string& s, std::size_t line) {
  std::istringstream ss(s);
  ss.imbue(std::locale::classic());
  double v = 0.0;
  ss >> v;
  if (ss.fail() || !ss.eof()) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ParseError("not a number: '" + s + "'", line);
  }
  return v;
}

inline long parse_int(const std::string& s, std::size_t line) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("not an integer: '" + s + "'", line);
  }
  if (pos != s.size()) throw ParseError("not an integer: '" + s + "'", line);
  return v;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Line> lines) : lines_(std::move(lines)) {}

  bool done() const { return pos_ >= lines_.size(); }
  std::size_t last_line() const { return lines_.empty() ? 0 : lines_.back().number; }

  const Line& next(const char* expecting) {
    if (done()) throw ParseError(std::string("unexpected end of input, expected ") + expecting,
                                 last_line());
    return lines_[pos_++];
  }

  // Reads `rows` lines of `cols` numbers; cols < 0 infers the width from the first line.
  Matrix matrix(long rows, long cols) {
    std::vector<std::vector<double>> data;
    for (long r = 0; rows < 0 || r < rows; ++r) {
      if (rows < 0 && done()) break;
      const Line& l = next("matrix row");
      if (cols < 0) cols = static_cast<long>(l.tokens.size());
      if (static_cast<long>(l.tokens.size()) != cols)
        throw ParseError("expected " + std::to_string(cols) + " values, got " +
                             std::to_string(l.tokens.size()),
                         l.number);
      std::vector<double> row;
      for (const auto& t : l.tokens) row.push_back(parse_double(t, l.number));
      data.push_back(std::move(row));
    }
    Matrix m(static_cast<Eigen::Index>(data.size()), cols < 0 ? 0 : cols);
    for (std::size_t r = 0; r < data.size(); ++r)
      for (long c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = data[r][static_cast<std::size_t>(c)];
    return m;
  }

  // Square matrix whose size is the token count of its first row.
  Matrix square() {
    if (done()) throw ParseError("unexpected end of input, expected matrix", last_line());
    const long m = static_cast<long>(lines_[pos_].tokens.size());
    return matrix(m, m);
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

inline void expect_arity(const Line& l, std::size_t n) {
  if (l.tokens.size() != n)
    throw ParseError("'" + l.tokens[0] + "' expects " + std::to_string(n - 1) + " argument(s)",
                     l.number);
}

}  // namespace io

// Reads an M-set description. Kinds and payloads:
//   box                      m rows of Mbar
//   asym_box                 m rows of C, then m rows of D
//   hadamard l1|l2|linf      m rows of Mbar
//   spectral_box m           a1 a2 a3
//   finite_set K             K square matrices, back to back
//   diagonal_polytope theta  one line of theta
//   diagonal_polytope ksupport m k
//   trace_ball m             r
inline MSet read_mset(std::istream& in) {
  io::Cursor cur(io::tokenize(in));
  const io::Line head = cur.next("set kind");
  const std::string& kind = head.tokens[0];
  MSet s;
  try {
    if (kind == "box") {
      io::expect_arity(head, 1);
      s = make_box(cur.square());
    } else if (kind == "asym_box") {
      io::expect_arity(head, 1);
      Matrix c = cur.square();
      Matrix d = cur.matrix(c.rows(), c.cols());
      s = make_asym_box(std::move(c), std::move(d));
    } else if (kind == "hadamard") {
      io::expect_arity(head, 2);
      const std::string& nk = head.tokens[1];
      HadamardNorm k;
      if (nk == "l1")
        k = HadamardNorm::l1;
      else if (nk == "l2")
        k = HadamardNorm::l2;
      else if (nk == "linf")
        k = HadamardNorm::linf;
      else
        throw ParseError("unknown hadamard norm '" + nk + "'", head.number);
      s = make_hadamard(cur.square(), k);
    } else if (kind == "spectral_box") {
      io::expect_arity(head, 2);
      const long m = io::parse_int(head.tokens[1], head.number);
      const Matrix a = cur.matrix(1, 3);
      s = make_spectral_box(static_cast<int>(m), a(0, 0), a(0, 1), a(0, 2));
    } else if (kind == "finite_set") {
      io::expect_arity(head, 2);
      const long k = io::parse_int(head.tokens[1], head.number);
      if (k < 1) throw ParseError("finite_set needs at least one member", head.number);
      std::vector<Matrix> members;
      for (long i = 0; i < k; ++i) members.push_back(cur.square());
      s = make_finite_set(std::move(members));
    } else if (kind == "diagonal_polytope") {
      if (head.tokens.size() >= 2 && head.tokens[1] == "theta") {
        io::expect_arity(head, 2);
        const Matrix t = cur.matrix(1, -1);
        s = make_diagonal_fixed(t.row(0).transpose());
      } else if (head.tokens.size() >= 2 && head.tokens[1] == "ksupport") {
        io::expect_arity(head, 4);
        s = make_k_support(static_cast<int>(io::parse_int(head.tokens[2], head.number)),
                           static_cast<int>(io::parse_int(head.tokens[3], head.number)));
      } else {
        throw ParseError("diagonal_polytope expects 'theta' or 'ksupport m k'", head.number);
      }
    } else if (kind == "trace_ball") {
      io::expect_arity(head, 2);
      const long m = io::parse_int(head.tokens[1], head.number);
      const Matrix r = cur.matrix(1, 1);
      s = make_trace_ball(static_cast<int>(m), r(0, 0));
    } else {
      throw ParseError("unknown set kind '" + kind + "'", head.number);
    }
  } catch (const InvalidInput& e) {
    throw ParseError(e.what(), head.number);
  }
  if (!cur.done()) throw ParseError("trailing content after set description", cur.next("").number);
  return s;
}

inline MSet read_mset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_mset(in);
}

// Dense matrix: one row per line, '#' comments allowed.
inline Matrix read_matrix(std::istream& in) {
  io::Cursor cur(io::tokenize(in));
  if (cur.done()) throw ParseError("empty matrix", 0);
  return cur.matrix(-1, -1);
}

inline Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_matrix(in);
}

inline void write_matrix(std::ostream& out, const Matrix& a, int digits = 12) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(digits);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) ss << ' ';
      ss << a(i, j);
    }
    ss << '\n';
  }
  out << ss.str();
}

inline void write_mset(std::ostream& out, const MSet& s) {
  std::visit(overloaded{
                 [&](const Box& b) {
                   out << "box\n";
                   write_matrix(out, b.mbar);
                 },
                 [&](const AsymBox& b) {
                   out << "asym_box\n";
                   write_matrix(out, b.center);
                   write_matrix(out, b.radius);
                 },
                 [&](const HadamardBall& h) {
                   out << "hadamard " << to_string(h.norm_kind) << '\n';
                   write_matrix(out, h.mbar);
                 },
                 [&](const SpectralBox& b) {
                   out << "spectral_box " << b.dim << '\n';
                   write_matrix(out, Eigen::RowVector3d(b.alpha1, b.alpha2, b.alpha3));
                 },
                 [&](const FiniteSet& f) {
                   out << "finite_set " << f.members.size() << '\n';
                   for (const Matrix& m : f.members) write_matrix(out, m);
                 },
                 [&](const DiagonalPolytope& d) {
                   if (d.kind == DiagonalKind::fixed) {
                     out << "diagonal_polytope theta\n";
                     write_matrix(out, d.theta.transpose());
                   } else {
                     out << "diagonal_polytope ksupport " << d.dim << ' ' << d.k << '\n';
                   }
                 },
                 [&](const TraceBall& t) {
                   out << "trace_ball " << t.dim << '\n';
                   write_matrix(out, Matrix::Constant(1, 1, t.radius));
                 },
             },
             s);
}

}  // namespace vgfkit
