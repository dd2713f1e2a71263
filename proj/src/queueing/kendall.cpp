#include "manet/queueing/kendall.hpp"

#include <cctype>
#include <limits>

#include "manet/error.hpp"

namespace manet::queueing {

std::string_view to_string(DistributionCode code) {
  switch (code) {
    case DistributionCode::M: return "M";
    case DistributionCode::E: return "E";
    case DistributionCode::G: return "G";
    case DistributionCode::GI: return "GI";
  }
  return "?";
}

std::string_view to_string(Ranking ranking) {
  switch (ranking) {
    case Ranking::FCFS: return "FCFS";
    case Ranking::LCFS: return "LCFS";
    case Ranking::PRI: return "PRI";
  }
  return "?";
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(std::string_view expected) const {
    std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'"
                                            : std::string("end of input");
    throw ParseError(pos_, "kendall: expected " + std::string(expected) +
                               " at offset " + std::to_string(pos_) + ", found " +
                               found);
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("'") + c + "'");
    ++pos_;
  }

  bool accept(std::string_view word) {
    if (text_.substr(pos_, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  DistributionCode code() {
    // GI before G: longest match.
    if (accept("GI")) return DistributionCode::GI;
    if (accept("M")) return DistributionCode::M;
    if (accept("E")) return DistributionCode::E;
    if (accept("G")) return DistributionCode::G;
    fail("distribution code (M, E, G, GI)");
  }

  std::uint64_t positive_int(std::string_view what) {
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
        pos_ = start;
        fail(what);
      }
      value = value * 10 + digit;
      ++pos_;
    }
    if (pos_ == start || value == 0) {
      pos_ = start;
      fail(what);
    }
    return value;
  }

  std::optional<std::uint64_t> int_or_inf(std::string_view what) {
    if (text_.size() - pos_ >= 3) {
      std::string word(text_.substr(pos_, 3));
      for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (word == "inf") {
        pos_ += 3;
        return std::nullopt;
      }
    }
    return positive_int(what);
  }

  Ranking ranking() {
    if (accept("FCFS")) return Ranking::FCFS;
    if (accept("LCFS")) return Ranking::LCFS;
    if (accept("PRI")) return Ranking::PRI;
    fail("ranking rule (FCFS, LCFS, PRI)");
  }

  void finish() {
    if (pos_ != text_.size()) fail("end of input");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_count(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : std::string("inf");
}

}  // namespace

KendallSpec parse_kendall(std::string_view text) {
  Cursor cur(text);
  KendallSpec spec;
  cur.expect('[');
  spec.arrival = cur.code();
  cur.expect('/');
  spec.service = cur.code();
  cur.expect('/');
  const auto servers = cur.positive_int("positive server count");
  if (servers > std::numeric_limits<std::uint32_t>::max()) {
    throw ParseError(0, "kendall: server count out of range");
  }
  spec.servers = static_cast<std::uint32_t>(servers);
  cur.expect(']');
  cur.expect(':');
  cur.expect('{');
  spec.capacity = cur.int_or_inf("capacity (positive integer or inf)");
  cur.expect('/');
  spec.population = cur.int_or_inf("population (positive integer or inf)");
  cur.expect('/');
  spec.ranking = cur.ranking();
  cur.expect('}');
  cur.finish();
  return spec;
}

std::string format_kendall(const KendallSpec& spec) {
  std::string out = "[";
  out += to_string(spec.arrival);
  out += '/';
  out += to_string(spec.service);
  out += '/';
  out += std::to_string(spec.servers);
  out += "]:{";
  out += format_count(spec.capacity);
  out += '/';
  out += format_count(spec.population);
  out += '/';
  out += to_string(spec.ranking);
  out += '}';
  return out;
}

}  // namespace manet::queueing
